#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_tolerances(CLI::App* cmd, pdil::cli::RunConfig& c) {
  cmd->add_option("--rank-tol", c.tol.rank_tol, "Relative singular-value cutoff");
  cmd->add_option("--residual-tol", c.tol.residual_tol, "Bound for identity residuals");
  cmd->add_option("--purity-margin", c.tol.purity_margin, "Spectral-radius gap below 1");
  cmd->add_option("--out", c.out, "Output directory");
}

void add_inputs(CLI::App* cmd, pdil::cli::RunConfig& c) {
  cmd->add_option("--pair", c.pair_file, "Pair JSON (default: <out>/pair.json)");
  cmd->add_option("--triple", c.triple_file, "Use this triple instead of constructing one");
}

void add_grid(CLI::App* cmd, pdil::cli::RunConfig& c) {
  cmd->add_option("--radii", c.radii, "Number of radii in the w grid");
  cmd->add_option("--angles", c.angles, "Angles per radius");
  cmd->add_option("--boundary-radius", c.boundary_radius, "Largest |w| sampled");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pdil::cli;
  RunConfig c;
  CLI::App app{"Isometric dilation of commuting pure contraction pairs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a commuting pure pair");
  gen->add_option("--seed", c.seed, "Random seed");
  gen->add_option("--dim", c.dim, "Dimension for --kind random");
  gen->add_option("--kind", c.kind, "random | shifts")->check(CLI::IsMember({"random", "shifts"}));
  gen->add_option("--n", c.n, "Shift dimension for --kind shifts");
  gen->add_option("--a", c.a, "Power of the shift in T1");
  gen->add_option("--b", c.b, "Power of the shift in T2");
  gen->add_option("--shrink", c.shrink, "Norm bound for --kind random");
  add_tolerances(gen, c);

  auto* certify = app.add_subcommand("certify", "Certify purity, build the triple, check blocks");
  add_inputs(certify, c);
  add_tolerances(certify, c);

  auto* dilate = app.add_subcommand("dilate", "Build the truncated Hardy-space dilation");
  add_inputs(dilate, c);
  dilate->add_option("--truncation", c.truncation, "Polynomial degree N");
  dilate->add_flag("--full", c.full, "Include full operator matrices in dilation.json");
  add_tolerances(dilate, c);

  auto* variety = app.add_subcommand("variety", "Sample the distinguished variety");
  add_inputs(variety, c);
  add_grid(variety, c);
  variety->add_option("--perturb-blocks", c.perturb_blocks,
                      "Add this multiple of I to the A block before cross-validation");
  add_tolerances(variety, c);

  auto* vncheck = app.add_subcommand("vncheck", "Run the von Neumann inequality suite");
  add_inputs(vncheck, c);
  add_grid(vncheck, c);
  vncheck->add_option("--polys", c.polys_file, "Polynomial JSON file");
  vncheck->add_option("--random-polys", c.random_polys, "Random polynomials when --polys is absent");
  vncheck->add_option("--seed", c.seed, "Seed for random polynomials");
  vncheck->add_option("--vn-slack", c.vn_slack, "Allowed excess of lhs over rhs");
  add_tolerances(vncheck, c);

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return cmd_gen(c, std::cout, std::cerr);
  if (certify->parsed()) return cmd_certify(c, std::cout, std::cerr);
  if (dilate->parsed()) return cmd_dilate(c, std::cout, std::cerr);
  if (variety->parsed()) return cmd_variety(c, std::cout, std::cerr);
  return cmd_vncheck(c, std::cout, std::cerr);
}
