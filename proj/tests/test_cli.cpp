#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "pdil/serialize.hpp"

using namespace pdil;
using namespace pdil::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "pdil_cli_test" / info->name();
    fs::remove_all(dir_);
    config_.out = dir_;
    config_.radii = 8;
    config_.angles = 32;
    config_.truncation = 10;
    config_.random_polys = 10;
  }

  int run(int (*cmd)(const RunConfig&, std::ostream&, std::ostream&)) {
    out_.str("");
    err_.str("");
    return cmd(config_, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  void write_pair(const CMat& t1, const CMat& t2) {
    fs::create_directories(dir_);
    write_json_file(dir_ / "pair.json", json{{"t1", to_json(t1)}, {"t2", to_json(t2)}});
  }

  fs::path dir_;
  RunConfig config_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, GenIsDeterministic) {
  config_.seed = 7;
  ASSERT_EQ(run(cmd_gen), kOk);
  const std::string first = slurp(dir_ / "pair.json");
  ASSERT_EQ(run(cmd_gen), kOk);
  EXPECT_EQ(first, slurp(dir_ / "pair.json"));
  const CommutingPair p = pair_from_json(read_json_file(dir_ / "pair.json"));
  EXPECT_EQ(p.dim(), 4);
}

TEST_F(CliTest, GenShifts) {
  config_.kind = "shifts";
  config_.n = 3;
  config_.a = 1;
  config_.b = 2;
  ASSERT_EQ(run(cmd_gen), kOk);
  const CommutingPair p = pair_from_json(read_json_file(dir_ / "pair.json"));
  EXPECT_TRUE(p.t1.t == CMat(nilpotent_shift(3)));
  EXPECT_TRUE(p.t2.t == matrix_power(nilpotent_shift(3), 2));
  config_.b = 3;
  EXPECT_EQ(run(cmd_gen), kGate);
}

TEST_F(CliTest, CertifyShiftPair) {
  config_.kind = "shifts";
  config_.n = 2;
  config_.a = config_.b = 1;
  ASSERT_EQ(run(cmd_gen), kOk);
  ASSERT_EQ(run(cmd_certify), kOk) << err_.str();
  const json r = read_json_file(dir_ / "certify.json");
  EXPECT_EQ(r["status"], "ok");
  EXPECT_EQ(r["block_purity"]["a_block"]["verdict"], "Pure");
  EXPECT_TRUE(r["wandering"]["phi"].get<bool>());
  const BCLTriple t = triple_from_json(read_json_file(dir_ / "triple.json"));
  CMat swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_LT((t.u - swap).norm(), 1e-15);
}

TEST_F(CliTest, CertifyRandomPairIsGreen) {
  config_.seed = 3;
  config_.dim = 6;
  ASSERT_EQ(run(cmd_gen), kOk);
  EXPECT_EQ(run(cmd_certify), kOk) << err_.str();
}

TEST_F(CliTest, IdentityPairHitsPurityGate) {
  write_pair(identity(2), identity(2));
  EXPECT_EQ(run(cmd_certify), kGate);
  const json r = read_json_file(dir_ / "certify.json");
  EXPECT_NE(r["status"].get<std::string>().find("not pure"), std::string::npos);
  EXPECT_EQ(r["purity"]["t1"]["verdict"], "NotPure");
  EXPECT_EQ(run(cmd_dilate), kGate);
  EXPECT_EQ(run(cmd_vncheck), kGate);
}

TEST_F(CliTest, NonCommutingPairHitsGate) {
  CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
  a(0, 1) = 0.5;
  b(1, 0) = 0.5;
  write_pair(a, b);
  EXPECT_EQ(run(cmd_certify), kGate);
  EXPECT_EQ(run(cmd_dilate), kGate);
}

TEST_F(CliTest, DilateAndCorruptedTriple) {
  ASSERT_EQ(run(cmd_gen), kOk);
  ASSERT_EQ(run(cmd_dilate), kOk) << err_.str();
  const json r = read_json_file(dir_ / "dilation.json");
  EXPECT_LE(r["max_residual"].get<double>(), 1e-8);
  EXPECT_FALSE(r.contains("matrices"));
  config_.full = true;
  ASSERT_EQ(run(cmd_dilate), kOk);
  EXPECT_TRUE(read_json_file(dir_ / "dilation.json").contains("matrices"));

  const CommutingPair p = pair_from_json(read_json_file(dir_ / "pair.json"));
  const BCLTriple t = build_complete_bcl_triple(p);
  write_json_file(dir_ / "bad_triple.json",
                  to_json(BCLTriple{t.d1, t.d2, identity(t.e_dim()), t.p}));
  config_.triple_file = dir_ / "bad_triple.json";
  EXPECT_EQ(run(cmd_dilate), kNumerical);
}

TEST_F(CliTest, VarietyOutputs) {
  config_.kind = "shifts";
  config_.n = 2;
  config_.a = config_.b = 1;
  ASSERT_EQ(run(cmd_gen), kOk);
  ASSERT_EQ(run(cmd_variety), kOk) << err_.str();
  std::ifstream csv(dir_ / "variety.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "w_re,w_im,z1_re,z1_im,z2_re,z2_im,res_phi,res_psi,res_tau");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    EXPECT_NEAR(v[2], v[4], 1e-12);
    EXPECT_NEAR(v[3], v[5], 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 8u * 32u * 2u);
  EXPECT_TRUE(read_json_file(dir_ / "variety.json")["distinguished"]["distinguished"].get<bool>());
}

TEST_F(CliTest, VarietyNegativeControls) {
  ASSERT_EQ(run(cmd_gen), kOk);
  config_.perturb_blocks = 0.1;
  EXPECT_EQ(run(cmd_variety), kNumerical);
  EXPECT_TRUE(read_json_file(dir_ / "variety.json")["cross_validation"]["flagged"].get<bool>());

  config_.perturb_blocks = 0.0;
  const CommutingPair p = pair_from_json(read_json_file(dir_ / "pair.json"));
  const BCLTriple t = build_complete_bcl_triple(p);
  write_json_file(dir_ / "id_triple.json",
                  to_json(BCLTriple{t.d1, t.d2, identity(t.e_dim()), t.p}));
  config_.triple_file = dir_ / "id_triple.json";
  EXPECT_EQ(run(cmd_variety), kGate);
  EXPECT_FALSE(read_json_file(dir_ / "variety.json")["distinguished"]["distinguished"].get<bool>());
}

TEST_F(CliTest, VncheckRandomAndFile) {
  ASSERT_EQ(run(cmd_gen), kOk);
  ASSERT_EQ(run(cmd_vncheck), kOk) << err_.str();
  const json r = read_json_file(dir_ / "vn.json");
  EXPECT_EQ(r["fail"], 0);
  EXPECT_EQ(r["reports"].size(), 10u);

  write_json_file(dir_ / "polys.json",
                  json{{"polys", json::array({to_json(BivariatePoly({{0.0}, {1.0}}))})}});
  config_.polys_file = dir_ / "polys.json";
  ASSERT_EQ(run(cmd_vncheck), kOk);
  EXPECT_EQ(read_json_file(dir_ / "vn.json")["reports"].size(), 1u);

  std::ofstream(dir_ / "bad_polys.json") << R"({"polys": [{"coeffs": 5}]})";
  config_.polys_file = dir_ / "bad_polys.json";
  EXPECT_EQ(run(cmd_vncheck), kIo);
}

TEST_F(CliTest, IoAndSchemaErrors) {
  config_.pair_file = dir_ / "missing.json";
  EXPECT_EQ(run(cmd_certify), kIo);
  fs::create_directories(dir_);
  std::ofstream(dir_ / "schema.json") << R"({"t1": {"rows": 2, "cols": 2, "data": [[1, 0]]}})";
  config_.pair_file = dir_ / "schema.json";
  EXPECT_EQ(run(cmd_certify), kIo);
  EXPECT_NE(err_.str().find("/t1/data"), std::string::npos);
}

TEST_F(CliTest, ConfigValidation) {
  config_.truncation = 1;
  EXPECT_EQ(run(cmd_gen), kIo);
  config_.truncation = 10;
  config_.tol.rank_tol = -1.0;
  EXPECT_EQ(run(cmd_gen), kIo);
  EXPECT_EQ(exit_code_for(ErrorCode::NotPure), kGate);
  EXPECT_EQ(exit_code_for(ErrorCode::TripleMismatch), kNumerical);
  EXPECT_EQ(exit_code_for(ErrorCode::Io), kIo);
}
