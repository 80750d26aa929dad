#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "pdil/linalg.hpp"

namespace pdil::cli {

enum ExitCode : int { kOk = 0, kGate = 2, kNumerical = 3, kIo = 4 };

struct RunConfig {
  std::uint64_t seed = 1;
  Index dim = 4;
  std::string kind = "random";  // random | shifts
  Index n = 3;
  int a = 1;
  int b = 2;
  double shrink = 0.9;
  int truncation = 40;
  int radii = 16;
  int angles = 64;
  double boundary_radius = 0.999;
  Tolerances tol;
  double vn_slack = 1e-3;
  std::filesystem::path out = ".";
  bool full = false;

  std::filesystem::path pair_file;    // defaults to out/pair.json
  std::filesystem::path triple_file;  // optional override
  std::filesystem::path polys_file;   // vncheck; random polynomials when empty
  int random_polys = 100;
  double perturb_blocks = 0.0;

  /// Throws Error(InvalidArgument) on nonpositive fields or N < 2.
  void validate() const;
  std::filesystem::path resolved_pair() const;
};

/// Each command writes its artifacts under config.out and returns an exit
/// code; diagnostics go to `err`, one-line summaries to `out`.
int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_dilate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_variety(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_vncheck(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Exit code for a library error: gate failures 2, numerical 3, input/output 4.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace pdil::cli
