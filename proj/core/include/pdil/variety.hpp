#pragma once

// Distinguished varieties of BCL triples and the von Neumann inequality.
//
// The variety {(z1, z2) : det(Φ(z1 z2) - z1) = det(Ψ(z1 z2) - z2) = 0} is
// sampled along w = z1 z2: since Φ(w)Ψ(w) = wI, every eigenvalue z1 of Φ(w)
// pairs with z2 = w / z1.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdil/bcl.hpp"

namespace pdil {

struct VarietyPoint {
  cplx w;
  cplx z1;
  cplx z2;
  double res_phi = 0.0;
  double res_psi = 0.0;
  std::optional<double> res_tau;
  bool accepted = false;
  Index radius_index = 0;
  Index angle_index = 0;
  Index eigen_index = 0;
};

struct VarietyGrid {
  std::vector<double> radii;
  int angles = 0;

  /// Radii with 1 - r_i = (1 - r_max)^{(i+1)/n}, i = 0..n-1.
  static VarietyGrid geometric(int n_radii, int angles, double r_max = 0.999);
  VarietyGrid refined() const;  ///< twice the radii and angles, same r_max
  double max_radius() const;
  cplx point(Index radius_index, Index angle_index) const;
  void validate() const;
};

struct VarietySample {
  std::vector<VarietyPoint> points;
  VarietyGrid grid;
  bool distinguished = false;  ///< distinguished_check at the grid's largest radius
};

/// Points ordered by radius index, angle index, then eigenvalue index.
VarietySample sample_variety(const BCLTriple& triple, const VarietyGrid& grid,
                             const Tolerances& tol = {});

/// Grid over z1; z2 ranges over eigenvalues of τ(z1).
VarietySample sample_transfer_variety(const BCLTriple& triple, const VarietyGrid& grid,
                                      const Tolerances& tol = {});

/// |det(τ(z1) - z2 I)| / Π (1 + |λ_i|), λ_i the eigenvalues of τ(z1).
double transfer_residual(const BlockDecomposition& blocks, cplx z1, cplx z2,
                         const Tolerances& tol = {});

struct CrossValidation {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t count = 0;
  bool flagged = false;  ///< max_residual > threshold
  double threshold = 1e-6;
};

CrossValidation cross_validate_varieties(const VarietySample& s, const BlockDecomposition& blocks,
                                         const Tolerances& tol = {}, double threshold = 1e-6);

/// Fills res_tau on every interior point of s.
void attach_transfer_residuals(VarietySample& s, const BlockDecomposition& blocks,
                               const Tolerances& tol = {});

struct DistinguishedReport {
  bool interior = false;     ///< every point with |w| <= boundary inside D^2
  bool exits = false;        ///< min(|z1|, |z2|) >= |w| - 1e-6 on every fiber
  double max_modulus = 0.0;  ///< max over |w| <= boundary of max(|z1|, |z2|)
  std::vector<double> fiber_min;  ///< per radius: min over the fiber of min(|z1|, |z2|)
  bool verdict() const noexcept { return interior && exits; }
};

DistinguishedReport distinguished_report(const VarietySample& s, double boundary_radius = 0.999,
                                         const Tolerances& tol = {});
bool distinguished_check(const VarietySample& s, double boundary_radius = 0.999,
                         const Tolerances& tol = {});

/// p(z1, z2) = Σ coeffs[i][j] z1^i z2^j.
struct BivariatePoly {
  std::vector<std::vector<cplx>> coeffs;

  BivariatePoly() = default;
  explicit BivariatePoly(std::vector<std::vector<cplx>> c);

  void trim();
  int deg1() const noexcept;
  int deg2() const noexcept;
  /// Σ |c_ij| (i + j): bounds |p(a) - p(b)| / max|a_k - b_k| on the closed bidisc.
  double lipschitz_bound() const;
};

cplx eval_poly(const BivariatePoly& p, cplx z1, cplx z2);
CMat eval_poly_matrix(const BivariatePoly& p, const CommutingPair& pair);

/// Total degree <= max_degree, coefficients uniform in the unit disc.
BivariatePoly random_poly(std::mt19937_64& rng, int max_degree = 4);

enum class VnVerdict { Pass, Inconclusive, Fail };

std::string_view to_string(VnVerdict v) noexcept;

struct VnReport {
  double lhs = 0.0;         ///< |p(T1, T2)|
  double rhs = 0.0;         ///< max |p| over sampled variety points
  double slack = 1e-3;
  double grid_bound = 0.0;  ///< Lipschitz allowance for the sampling gap
  VnVerdict verdict = VnVerdict::Fail;
  std::size_t points = 0;
  int radii = 0;
  int angles = 0;
  double max_radius = 0.0;
};

VnReport von_neumann_check(const CommutingPair& pair, const BCLTriple& triple,
                           const BivariatePoly& p, const VarietyGrid& grid, double slack = 1e-3,
                           const Tolerances& tol = {});

/// Same check against an already sampled variety.
VnReport von_neumann_check(const CommutingPair& pair, const VarietySample& sample,
                           const BivariatePoly& p, double slack = 1e-3);

struct VnSuiteReport {
  std::vector<VnReport> reports;        ///< final verdict per polynomial
  std::size_t pass = 0;
  std::size_t inconclusive = 0;
  std::size_t fail = 0;
  std::size_t inconclusive_initial = 0;  ///< before grid refinement
  bool refined = false;
};

/// Runs every polynomial on `grid`; inconclusive ones are re-run once on
/// grid.refined() when `refine` is set.
VnSuiteReport von_neumann_suite(const CommutingPair& pair, const BCLTriple& triple,
                                const std::vector<BivariatePoly>& polys, const VarietyGrid& grid,
                                double slack = 1e-3, bool refine = true,
                                const Tolerances& tol = {});

}  // namespace pdil
