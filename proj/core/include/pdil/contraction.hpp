#pragma once

// Contractions, commuting pairs and their certificates.

#include <cstdint>
#include <vector>

#include "pdil/linalg.hpp"

namespace pdil {

struct Contraction {
  CMat t;
  CMat defect;    ///< (I - T*T)^{1/2}
  CMat codefect;  ///< (I - TT*)^{1/2}
  SubspaceBasis defect_basis;
  SubspaceBasis codefect_basis;

  Index dim() const noexcept { return t.rows(); }
};

/// Throws NotContraction when |T| > 1 + residual_tol.
Contraction make_contraction(const CMat& t, const Tolerances& tol = {});

struct CommutingPair {
  Contraction t1;
  Contraction t2;
  CMat product;  ///< T1 T2

  Index dim() const noexcept { return t1.dim(); }
};

enum class PairCheck { Strict, Diagnostic };

/// Strict mode throws HypothesisViolated when the commutator or the defect
/// identity exceeds residual_tol. Diagnostic mode only validates shapes.
CommutingPair make_commuting_pair(const CMat& t1, const CMat& t2, const Tolerances& tol = {},
                                  PairCheck check = PairCheck::Strict);

enum class Purity { Pure, NotPure, Borderline };

std::string_view to_string(Purity p) noexcept;

struct PurityCertificate {
  double spectral_radius = 0.0;
  std::vector<double> decay;  ///< |T^{*m}| for m = 1..m_max
  Purity verdict = Purity::NotPure;
  double margin = 0.0;
};

/// Pure below 1 - margin; NotPure once the radius is within rounding of 1
/// (at or above 1 - margin/10); Borderline in between.
Purity classify_radius(double radius, double margin) noexcept;

PurityCertificate certify_pure(const CMat& t, int m_max, const Tolerances& tol = {});
inline PurityCertificate certify_pure(const Contraction& t, int m_max,
                                      const Tolerances& tol = {}) {
  return certify_pure(t.t, m_max, tol);
}

/// Basis of {h : |X^n h| = |h| for all n}, X = T or T* per `adjoint`.
SubspaceBasis isometric_part(const CMat& t, bool adjoint, const Tolerances& tol = {});

bool certify_cnc(const CMat& t, const Tolerances& tol = {});
bool certify_cnu(const CMat& t, const Tolerances& tol = {});

/// M(T) = [[T, D_{T*}], [0, 0]] on H + H.
Contraction halmos_mclaughlin_extension(const Contraction& t, const Tolerances& tol = {});

/// T1 = p(M), T2 = q(M) for a random complex matrix M and random polynomials
/// of degree 1..3, both rescaled by shrink / max(1, |T1|, |T2|).
CommutingPair random_commuting_pure_pair(std::uint64_t seed, Index dim, double shrink,
                                         const Tolerances& tol = {});

/// (J^a, J^b) with J the n-dimensional nilpotent shift, J e_i = e_{i+1}.
CommutingPair truncated_shift_pair(Index n, int a, int b, const Tolerances& tol = {});

CMat nilpotent_shift(Index n);

struct DefectIdentityReport {
  double operator_residual = 0.0;  ///< pair condition as an operator identity
  double form_residual = 0.0;      ///< induced norm identity on basis vectors
  double commutator = 0.0;
  bool flagged = false;
};

DefectIdentityReport check_defect_identities(const CommutingPair& pair,
                                             const Tolerances& tol = {});

bool is_partial_isometry(const CMat& x, const Tolerances& tol = {});

/// Dimension of span{K, XK, ..., X^{n-1}K} with K = ker X*.
Index wandering_rank(const CMat& x, const Tolerances& tol = {});

}  // namespace pdil
