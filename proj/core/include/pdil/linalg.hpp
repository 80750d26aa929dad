#pragma once

// Dense complex linear-algebra kernel shared by every other module.
//
// All functions are pure: they read their arguments and return fresh values.
// Bases returned by range_basis/kernel_basis are deterministic for a fixed
// input: singular vectors come in descending singular-value order and each
// column is rotated so its largest-magnitude component is real and positive.

#include <complex>

#include <Eigen/Dense>

#include "pdil/errors.hpp"

namespace pdil {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

struct Tolerances {
  double rank_tol = 1e-10;       ///< relative singular-value cutoff
  double residual_tol = 1e-8;    ///< bound for identity checks
  double purity_margin = 1e-9;   ///< spectral-radius gap below 1

  /// Throws Error(InvalidArgument) unless every field lies in (0, 1).
  void validate() const;
};

/// Orthonormal basis of a subspace of C^ambient_dim, stored as columns.
struct SubspaceBasis {
  Index ambient_dim = 0;
  CMat basis;

  Index dim() const noexcept { return basis.cols(); }
  CMat projector() const { return basis * basis.adjoint(); }
};

CMat identity(Index n);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues below
/// rank_tol*|M| are clipped to zero; anything more negative than
/// rank_tol*max(1,|M|) is rejected with NotPSD.
CMat hermitian_sqrt(const CMat& m, const Tolerances& tol = {});

/// Square root with explicit thresholds: eigenvalues below -negativity_floor
/// throw NotPSD, eigenvalues below clip_cutoff become zero.
CMat psd_sqrt(const CMat& m, double negativity_floor, double clip_cutoff,
              double hermitian_bound);

SubspaceBasis range_basis(const CMat& m, const Tolerances& tol = {});
SubspaceBasis kernel_basis(const CMat& m, const Tolerances& tol = {});

// Absolute-cutoff variants: singular values > cutoff count toward the range.
SubspaceBasis range_basis_abs(const CMat& m, double cutoff);
SubspaceBasis kernel_basis_abs(const CMat& m, double cutoff);

/// Unitary W on C^ambient_dim with W * domain.basis = codomain.basis * action.
/// The orthocomplements are paired in order: the i-th vector of
/// range_basis(I - P_domain) goes to the i-th vector of range_basis(I - P_codomain).
CMat extend_isometry_to_unitary(const SubspaceBasis& domain, const SubspaceBasis& codomain,
                                const CMat& action, Index ambient_dim,
                                const Tolerances& tol = {});

CVec eigenvalues(const CMat& m);
double spectral_radius(const CMat& m);
double operator_norm(const CMat& m);

/// Moore-Penrose inverse with singular values <= rel_cutoff*sigma_max dropped.
CMat pseudo_inverse(const CMat& m, double rel_cutoff);

/// max(|X^*X - I|, |XX^* - I|) in operator norm.
double unitarity_residual(const CMat& x);

/// |X X^* X - X| in operator norm.
double partial_isometry_residual(const CMat& x);

CMat matrix_power(const CMat& m, int k);

bool all_finite(const CMat& m);

// Rotate each column so its largest-magnitude entry is real positive.
void normalize_column_phases(CMat& m);

}  // namespace pdil
