#pragma once

// JSON and CSV encodings. Matrices use {"rows", "cols", "data": [[re, im], ...]}
// in row-major order. Decoding failures throw Error(Schema) with a JSON
// pointer to the offending value; file failures throw Error(Io).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdil/hardy.hpp"
#include "pdil/variety.hpp"

namespace pdil {

using json = nlohmann::json;

json to_json(const CMat& m);
CMat matrix_from_json(const json& j, const std::string& pointer = "");

json to_json(const CommutingPair& pair);
CommutingPair pair_from_json(const json& j, const Tolerances& tol = {},
                             PairCheck check = PairCheck::Strict);

json to_json(const BCLTriple& triple);
/// Shapes are checked here; call validate_triple for the numerical invariants.
BCLTriple triple_from_json(const json& j);

json to_json(const PurityCertificate& cert);
json to_json(const DefectIdentityReport& rep);
json to_json(const RelationReport& rep);
json to_json(const RecurrenceReport& rep);
json to_json(const BclPurity& p);
json to_json(const WanderingReport& rep);
json to_json(const DilationResiduals& res);
json to_json(const MinimalityReport& rep);
json to_json(const CrossValidation& cv);
json to_json(const DistinguishedReport& rep);
json to_json(const VnReport& rep);
json to_json(const VnSuiteReport& rep);
json to_json(const Tolerances& tol);

json to_json(const BivariatePoly& p);
BivariatePoly poly_from_json(const json& j, const std::string& pointer = "");
/// {"polys": [{"coeffs": [[[re, im], ...], ...]}, ...]}
std::vector<BivariatePoly> polys_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Columns w_re, w_im, z1_re, z1_im, z2_re, z2_im, res_phi, res_psi, res_tau;
/// res_tau is left empty where undefined.
void write_variety_csv(std::ostream& os, const VarietySample& s);
void write_variety_csv(const std::filesystem::path& path, const VarietySample& s);

}  // namespace pdil
