#include "commands.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "pdil/serialize.hpp"

#ifndef PDIL_VERSION
#define PDIL_VERSION "unknown"
#endif

namespace pdil::cli {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  std::ostringstream bad;
  if (dim < 1) bad << " --dim";
  if (n < 1) bad << " --n";
  if (a < 1) bad << " --a";
  if (b < 1) bad << " --b";
  if (truncation < 2) bad << " --truncation (needs >= 2)";
  if (radii < 1) bad << " --radii";
  if (angles < 1) bad << " --angles";
  if (!(boundary_radius > 0.0 && boundary_radius < 1.0)) bad << " --boundary-radius";
  if (!(shrink > 0.0 && shrink < 1.0)) bad << " --shrink";
  if (!(vn_slack > 0.0)) bad << " --vn-slack";
  if (random_polys < 1) bad << " --random-polys";
  if (kind != "random" && kind != "shifts") bad << " --kind";
  if (!bad.str().empty()) throw Error(ErrorCode::InvalidArgument, "invalid option values:" + bad.str());
  tol.validate();
}

fs::path RunConfig::resolved_pair() const {
  return pair_file.empty() ? out / "pair.json" : pair_file;
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPure:
    case ErrorCode::HypothesisViolated:
    case ErrorCode::NotContraction:
    case ErrorCode::InvalidPowers:
      return kGate;
    case ErrorCode::Schema:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
      return kIo;
    default:
      return kNumerical;
  }
}

namespace {

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "pdil: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "pdil: " << e.what() << '\n';
    return kIo;
  }
}

json metadata(const char* command) {
  return {{"tool", "pdil"}, {"version", PDIL_VERSION}, {"command", command}};
}

void ensure_out_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + c.out.string() + ": " + ec.message());
}

CommutingPair load_pair(const RunConfig& c, PairCheck check = PairCheck::Strict) {
  return pair_from_json(read_json_file(c.resolved_pair()), c.tol, check);
}

BCLTriple triple_for(const RunConfig& c, const CommutingPair& pair, json* log_out = nullptr) {
  if (!c.triple_file.empty()) {
    BCLTriple t = triple_from_json(read_json_file(c.triple_file));
    validate_triple(t, c.tol);
    if (log_out) *log_out = json::array({"triple read from " + c.triple_file.string()});
    return t;
  }
  std::vector<std::string> log;
  BCLTriple t = build_complete_bcl_triple(pair, c.tol, &log);
  if (log_out) *log_out = log;
  return t;
}

int default_steps(Index dim) { return static_cast<int>(60 * std::max<Index>(1, dim)); }

}  // namespace

int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    ensure_out_dir(config);
    const CommutingPair pair =
        config.kind == "random"
            ? random_commuting_pure_pair(config.seed, config.dim, config.shrink, config.tol)
            : truncated_shift_pair(config.n, config.a, config.b, config.tol);
    json j = to_json(pair);
    json meta = metadata("gen");
    meta["kind"] = config.kind;
    if (config.kind == "random") {
      meta["seed"] = config.seed;
      meta["dim"] = config.dim;
      meta["shrink"] = config.shrink;
    } else {
      meta["n"] = config.n;
      meta["a"] = config.a;
      meta["b"] = config.b;
    }
    j["metadata"] = std::move(meta);
    const fs::path path = config.out / "pair.json";
    write_json_file(path, j);
    out << "wrote " << path.string() << " (dim " << pair.dim() << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    ensure_out_dir(config);
    const fs::path path = config.out / "certify.json";
    const CommutingPair pair = load_pair(config, PairCheck::Diagnostic);
    const Tolerances& tol = config.tol;
    json report;
    report["metadata"] = metadata("certify");
    report["tolerances"] = to_json(tol);

    const DefectIdentityReport ids = check_defect_identities(pair, tol);
    report["pair"] = {{"dim", pair.dim()}, {"defect_identities", to_json(ids)}};
    if (ids.flagged) {
      report["status"] = "gate: T1 and T2 do not commute";
      write_json_file(path, report);
      err << "pdil: gate failure: pair does not commute (commutator " << ids.commutator << ")\n";
      return static_cast<int>(kGate);
    }

    const int steps = default_steps(pair.dim());
    const PurityCertificate c1 = certify_pure(pair.t1, steps, tol);
    const PurityCertificate c2 = certify_pure(pair.t2, steps, tol);
    const PurityCertificate c12 = certify_pure(pair.product, steps, tol);
    report["purity"] = {{"t1", to_json(c1)}, {"t2", to_json(c2)}, {"product", to_json(c12)}};
    std::vector<std::string> impure;
    if (c1.verdict != Purity::Pure) impure.push_back("T1");
    if (c2.verdict != Purity::Pure) impure.push_back("T2");
    if (c12.verdict != Purity::Pure) impure.push_back("T1T2");
    if (!impure.empty()) {
      std::string who;
      for (const auto& s : impure) who += (who.empty() ? "" : ", ") + s;
      report["status"] = "gate: not pure (" + who + "); the dilation needs a pure pair";
      write_json_file(path, report);
      err << "pdil: gate failure: " << who << " not pure\n";
      out << "certify: NotPure (" << who << ")\n";
      return static_cast<int>(kGate);
    }

    json log;
    const BCLTriple triple = triple_for(config, pair, &log);
    write_json_file(config.out / "triple.json", to_json(triple));
    report["triple"] = to_json(triple);
    report["construction_log"] = log;

    const RelationReport rel = verify_unitary_relations(triple, pair, tol);
    const RecurrenceReport rec = verify_recurrence(triple, pair, 10, tol);
    const BclPurity bp = certify_bcl_pure(triple, tol);
    const BclSymbols sym = bcl_symbols(triple);
    const PurityCertificate cphi = compression_purity_check(sym.phi, 6, tol);
    const PurityCertificate cpsi = compression_purity_check(sym.psi, 6, tol);
    const bool consistent =
        cphi.verdict == bp.d_star_block.verdict && cpsi.verdict == bp.a_block.verdict;
    const auto [cnc_a, cnc_d] = certify_cnc_blocks(triple, tol);
    const WanderingReport wr = wandering_check_symbols(triple, tol);

    report["relations"] = to_json(rel);
    report["recurrence"] = to_json(rec);
    report["symbol_product_residual"] = sym.product_residual;
    report["block_purity"] = to_json(bp);
    report["compression_purity"] = {
        {"phi", to_json(cphi)}, {"psi", to_json(cpsi)}, {"consistent", consistent}};
    report["cnc_blocks"] = {{"a", cnc_a}, {"d_star", cnc_d}};
    report["wandering"] = to_json(wr);

    const bool green = !rel.flagged && !rec.flagged && sym.product_residual <= tol.residual_tol &&
                       bp.both_pure() && consistent && cnc_a && cnc_d && wr.phi && wr.psi;
    report["status"] = green ? "ok" : "numerical: a certificate failed on a pure pair";
    write_json_file(path, report);
    out << "certify: " << (green ? "ok" : "FAILED") << " (relations " << rel.max_residual
        << ", recurrence " << rec.max_residual << ")\n";
    return static_cast<int>(green ? kOk : kNumerical);
  });
}

int cmd_dilate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    ensure_out_dir(config);
    const CommutingPair pair = load_pair(config);
    const BCLTriple triple = triple_for(config, pair);
    const DilationPackage pkg = dilation_map_pair(pair, triple, config.truncation, config.tol);
    const DilationResiduals& r = pkg.residuals;
    const double worst = std::max({r.max_intertwining(), r.symbol_product, r.v_isometry,
                                   r.isometry_defect});
    const bool ok = worst <= config.tol.residual_tol;

    json report;
    report["metadata"] = metadata("dilate");
    report["tolerances"] = to_json(config.tol);
    report["space"] = {{"degree", pkg.space.degree},
                       {"fiber_dim", pkg.space.fiber_dim},
                       {"total_dim", pkg.space.total_dim()},
                       {"d1", triple.d1},
                       {"d2", triple.d2}};
    report["residuals"] = to_json(r);
    report["max_residual"] = worst;
    report["status"] = ok ? "ok" : "numerical: residual above tolerance";
    if (config.full) {
      if (pkg.space.total_dim() > 5000)
        err << "pdil: warning: writing full matrices of dimension " << pkg.space.total_dim() << '\n';
      report["matrices"] = {{"v", to_json(pkg.v)},
                            {"pi_v", to_json(pkg.pi_v)},
                            {"m_phi", to_json(pkg.m_phi)},
                            {"m_psi", to_json(pkg.m_psi)},
                            {"m_z", to_json(pkg.m_z)}};
    }
    write_json_file(config.out / "dilation.json", report);
    out << "dilate: " << (ok ? "ok" : "FAILED") << " (max residual " << worst << ")\n";
    return static_cast<int>(ok ? kOk : kNumerical);
  });
}

int cmd_variety(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    ensure_out_dir(config);
    const CommutingPair pair = load_pair(config);
    const BCLTriple triple = triple_for(config, pair);
    const BclPurity bp = certify_bcl_pure(triple, config.tol);

    const VarietyGrid grid = VarietyGrid::geometric(config.radii, config.angles, config.boundary_radius);
    VarietySample sample = sample_variety(triple, grid, config.tol);
    BlockDecomposition blocks = block_decomposition(triple);
    if (config.perturb_blocks != 0.0)
      blocks.a += config.perturb_blocks * identity(blocks.a.rows());
    attach_transfer_residuals(sample, blocks, config.tol);
    const CrossValidation cv = cross_validate_varieties(sample, blocks, config.tol);
    const DistinguishedReport dist = distinguished_report(sample, config.boundary_radius, config.tol);
    sample.distinguished = dist.verdict();
    write_variety_csv(config.out / "variety.csv", sample);

    std::size_t accepted = 0;
    for (const auto& p : sample.points) accepted += p.accepted ? 1 : 0;
    int code = kOk;
    std::string status = "ok";
    if (!bp.both_pure()) {
      code = kGate;
      status = "gate: block compressions not pure, so the variety need not be distinguished";
    } else if (!dist.verdict() || cv.flagged || accepted != sample.points.size()) {
      code = kNumerical;
      status = "numerical: variety check failed";
    }
    json report;
    report["metadata"] = metadata("variety");
    report["tolerances"] = to_json(config.tol);
    report["grid"] = {{"radii", config.radii},
                      {"angles", config.angles},
                      {"boundary_radius", config.boundary_radius}};
    report["points"] = sample.points.size();
    report["accepted"] = accepted;
    report["block_purity"] = to_json(bp);
    report["cross_validation"] = to_json(cv);
    report["distinguished"] = to_json(dist);
    report["perturb_blocks"] = config.perturb_blocks;
    report["status"] = status;
    write_json_file(config.out / "variety.json", report);
    if (code != kOk) err << "pdil: " << status << '\n';
    out << "variety: " << sample.points.size() << " points, distinguished="
        << (dist.verdict() ? "true" : "false") << ", cross-validation max " << cv.max_residual << '\n';
    return code;
  });
}

int cmd_vncheck(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    ensure_out_dir(config);
    const CommutingPair pair = load_pair(config);
    const int steps = default_steps(pair.dim());
    for (const auto* t : {&pair.t1.t, &pair.t2.t}) {
      if (certify_pure(*t, steps, config.tol).verdict != Purity::Pure)
        throw Error(ErrorCode::NotPure, "pair member is not pure");
    }
    const BCLTriple triple = triple_for(config, pair);
    if (!certify_bcl_pure(triple, config.tol).both_pure())
      throw Error(ErrorCode::NotPure, "block compressions of the triple are not pure");

    std::vector<BivariatePoly> polys;
    if (!config.polys_file.empty()) {
      polys = polys_from_json(read_json_file(config.polys_file));
    } else {
      std::mt19937_64 rng(config.seed);
      for (int i = 0; i < config.random_polys; ++i) polys.push_back(random_poly(rng));
    }
    const VarietyGrid grid = VarietyGrid::geometric(config.radii, config.angles, config.boundary_radius);
    const VnSuiteReport suite =
        von_neumann_suite(pair, triple, polys, grid, config.vn_slack, true, config.tol);

    json report = to_json(suite);
    report["metadata"] = metadata("vncheck");
    report["slack"] = config.vn_slack;
    report["grid"] = {{"radii", config.radii},
                      {"angles", config.angles},
                      {"boundary_radius", config.boundary_radius}};
    report["note"] =
        "rhs is the sampled maximum over |w| <= boundary_radius, a lower bound for the supremum "
        "over the closed variety";
    write_json_file(config.out / "vn.json", report);
    out << "vncheck: " << suite.pass << " pass, " << suite.inconclusive << " inconclusive, "
        << suite.fail << " fail\n";
    return static_cast<int>(suite.fail == 0 ? kOk : kNumerical);
  });
}

}  // namespace pdil::cli
