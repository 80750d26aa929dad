#include "pdil/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pdil {

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::Schema, (pointer.empty() ? "/" : pointer) + ": " + what);
}

const json& member(const json& j, const std::string& pointer, const char* key) {
  if (!j.is_object()) schema_error(pointer, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(pointer, std::string("missing key \"") + key + "\"");
  return *it;
}

Index positive_int(const json& j, const std::string& pointer) {
  if (!j.is_number_integer() || j.get<long long>() < 1) schema_error(pointer, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

Index nonnegative_int(const json& j, const std::string& pointer) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(pointer, "expected a nonnegative integer");
  return static_cast<Index>(j.get<long long>());
}

cplx complex_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema_error(pointer, "expected a [re, im] pair of numbers");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) schema_error(pointer, "non-finite entry");
  return {re, im};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json doubles(const std::vector<double>& v) { return json(v); }

}  // namespace

json to_json(const CMat& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMat matrix_from_json(const json& j, const std::string& pointer) {
  const Index rows = positive_int(member(j, pointer, "rows"), pointer + "/rows");
  const Index cols = positive_int(member(j, pointer, "cols"), pointer + "/cols");
  const json& data = member(j, pointer, "data");
  if (!data.is_array()) schema_error(pointer + "/data", "expected an array");
  if (static_cast<Index>(data.size()) != rows * cols) {
    std::ostringstream os;
    os << "expected " << rows * cols << " entries, found " << data.size();
    schema_error(pointer + "/data", os.str());
  }
  CMat m(rows, cols);
  for (Index k = 0; k < rows * cols; ++k)
    m(k / cols, k % cols) =
        complex_from_json(data[static_cast<std::size_t>(k)], pointer + "/data/" + std::to_string(k));
  return m;
}

json to_json(const CommutingPair& pair) {
  return {{"t1", to_json(pair.t1.t)}, {"t2", to_json(pair.t2.t)}};
}

CommutingPair pair_from_json(const json& j, const Tolerances& tol, PairCheck check) {
  const CMat t1 = matrix_from_json(member(j, "", "t1"), "/t1");
  const CMat t2 = matrix_from_json(member(j, "", "t2"), "/t2");
  if (t1.rows() != t1.cols()) schema_error("/t1", "matrix must be square");
  if (t2.rows() != t2.cols()) schema_error("/t2", "matrix must be square");
  if (t1.rows() != t2.rows()) schema_error("/t2", "dimension differs from /t1");
  return make_commuting_pair(t1, t2, tol, check);
}

json to_json(const BCLTriple& triple) {
  return {{"e_dim", triple.e_dim()},
          {"d1", triple.d1},
          {"d2", triple.d2},
          {"u", to_json(triple.u)},
          {"p", to_json(triple.p)}};
}

BCLTriple triple_from_json(const json& j) {
  BCLTriple t;
  t.d1 = nonnegative_int(member(j, "", "d1"), "/d1");
  t.d2 = nonnegative_int(member(j, "", "d2"), "/d2");
  const Index e = positive_int(member(j, "", "e_dim"), "/e_dim");
  if (e != t.d1 + t.d2) schema_error("/e_dim", "must equal d1 + d2");
  t.u = matrix_from_json(member(j, "", "u"), "/u");
  t.p = matrix_from_json(member(j, "", "p"), "/p");
  if (t.u.rows() != e || t.u.cols() != e) schema_error("/u", "must be e_dim x e_dim");
  if (t.p.rows() != e || t.p.cols() != e) schema_error("/p", "must be e_dim x e_dim");
  return t;
}

json to_json(const PurityCertificate& cert) {
  return {{"spectral_radius", cert.spectral_radius},
          {"decay", doubles(cert.decay)},
          {"verdict", std::string(to_string(cert.verdict))},
          {"margin", cert.margin}};
}

json to_json(const DefectIdentityReport& rep) {
  return {{"operator_residual", rep.operator_residual},
          {"form_residual", rep.form_residual},
          {"commutator", rep.commutator},
          {"flagged", rep.flagged}};
}

json to_json(const RelationReport& rep) {
  return {{"residuals", doubles(rep.residuals)},
          {"max_residual", rep.max_residual},
          {"flagged", rep.flagged}};
}

json to_json(const RecurrenceReport& rep) {
  return {{"a_side", doubles(rep.a_side)},
          {"d_side", doubles(rep.d_side)},
          {"max_residual", rep.max_residual},
          {"flagged", rep.flagged}};
}

json to_json(const BclPurity& p) {
  return {{"a_block", to_json(p.a_block)}, {"d_star_block", to_json(p.d_star_block)}};
}

json to_json(const WanderingReport& rep) {
  return {{"phi", rep.phi},
          {"psi", rep.psi},
          {"phi_partial_isometry", rep.phi_partial_isometry},
          {"psi_partial_isometry", rep.psi_partial_isometry},
          {"phi_rank", rep.phi_rank},
          {"psi_rank", rep.psi_rank}};
}

json to_json(const DilationResiduals& res) {
  return {{"intertwining_phi", res.intertwining_phi},
          {"intertwining_psi", res.intertwining_psi},
          {"intertwining_z", res.intertwining_z},
          {"symbol_product", res.symbol_product},
          {"v_isometry", res.v_isometry},
          {"isometry_defect", res.isometry_defect},
          {"defects", doubles(res.defects)},
          {"tail_norms", doubles(res.tail_norms)}};
}

json to_json(const MinimalityReport& rep) {
  return {{"ranks", rep.ranks}, {"expected", rep.expected}, {"minimal", rep.minimal}};
}

json to_json(const CrossValidation& cv) {
  return {{"max_residual", cv.max_residual},
          {"mean_residual", cv.mean_residual},
          {"count", cv.count},
          {"threshold", cv.threshold},
          {"flagged", cv.flagged}};
}

json to_json(const DistinguishedReport& rep) {
  json fm = json::array();
  for (double v : rep.fiber_min) fm.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return {{"interior", rep.interior},
          {"exits", rep.exits},
          {"max_modulus", rep.max_modulus},
          {"fiber_min", std::move(fm)},
          {"distinguished", rep.verdict()}};
}

json to_json(const VnReport& rep) {
  return {{"lhs", rep.lhs},
          {"rhs", rep.rhs},
          {"verdict", std::string(to_string(rep.verdict))},
          {"slack", rep.slack},
          {"grid_bound", rep.grid_bound},
          {"grid", {{"radii", rep.radii}, {"angles", rep.angles}, {"max_radius", rep.max_radius}}},
          {"points", rep.points}};
}

json to_json(const VnSuiteReport& rep) {
  json reports = json::array();
  for (const auto& r : rep.reports) reports.push_back(to_json(r));
  return {{"reports", std::move(reports)},
          {"pass", rep.pass},
          {"inconclusive", rep.inconclusive},
          {"fail", rep.fail},
          {"inconclusive_initial", rep.inconclusive_initial},
          {"refined", rep.refined}};
}

json to_json(const Tolerances& tol) {
  return {{"rank_tol", tol.rank_tol},
          {"residual_tol", tol.residual_tol},
          {"purity_margin", tol.purity_margin}};
}

json to_json(const BivariatePoly& p) {
  json rows = json::array();
  for (const auto& row : p.coeffs) {
    json r = json::array();
    for (cplx c : row) r.push_back(complex_to_json(c));
    rows.push_back(std::move(r));
  }
  return {{"coeffs", std::move(rows)}};
}

BivariatePoly poly_from_json(const json& j, const std::string& pointer) {
  const json& rows = member(j, pointer, "coeffs");
  const std::string base = pointer + "/coeffs";
  if (!rows.is_array()) schema_error(base, "expected an array of rows");
  std::vector<std::vector<cplx>> c;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rp = base + "/" + std::to_string(i);
    if (!rows[i].is_array()) schema_error(rp, "expected an array of [re, im] pairs");
    std::vector<cplx> row;
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      row.push_back(complex_from_json(rows[i][k], rp + "/" + std::to_string(k)));
    c.push_back(std::move(row));
  }
  return BivariatePoly(std::move(c));
}

std::vector<BivariatePoly> polys_from_json(const json& j) {
  const json& list = member(j, "", "polys");
  if (!list.is_array()) schema_error("/polys", "expected an array");
  std::vector<BivariatePoly> out;
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(poly_from_json(list[i], "/polys/" + std::to_string(i)));
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::Schema, path.string() + ": " + err.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_variety_csv(std::ostream& os, const VarietySample& s) {
  os << "w_re,w_im,z1_re,z1_im,z2_re,z2_im,res_phi,res_psi,res_tau\n";
  os << std::setprecision(17);
  for (const VarietyPoint& p : s.points) {
    os << p.w.real() << ',' << p.w.imag() << ',' << p.z1.real() << ',' << p.z1.imag() << ','
       << p.z2.real() << ',' << p.z2.imag() << ',' << p.res_phi << ',' << p.res_psi << ',';
    if (p.res_tau) os << *p.res_tau;
    os << '\n';
  }
}

void write_variety_csv(const std::filesystem::path& path, const VarietySample& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_variety_csv(out, s);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace pdil
