#pragma once

// Degree-N sections of the vector-valued Hardy space, represented by
// coefficient blocks f = (f_0, ..., f_N), each f_k in C^d.

#include <vector>

#include "pdil/bcl.hpp"

namespace pdil {

struct TruncatedHardy {
  int degree = 0;       ///< N
  Index fiber_dim = 0;  ///< d

  Index total_dim() const noexcept { return (degree + 1) * fiber_dim; }
};

/// Block lower-bidiagonal matrix of the pencil multiplication on the section:
/// c0 on the diagonal, c1 on the first subdiagonal.
CMat multiplication_matrix(const PencilSymbol& symbol, int n);

/// Multiplication by z on the degree-N section of H^2(C^d).
CMat shift_matrix(Index fiber_dim, int n);

/// Π_T with coefficient blocks Q* D_{T*} T^{*k}, k = 0..N, Q the codefect basis.
/// Throws NotPure unless certify_pure(T) is Pure.
CMat dilation_map_single(const Contraction& t, int n, const Tolerances& tol = {});

struct DilationResiduals {
  double intertwining_phi = 0.0;  ///< |Π_V T1* - M_Φ* Π_V| on rows 0..N
  double intertwining_psi = 0.0;  ///< |Π_V T2* - M_Ψ* Π_V| on rows 0..N
  double intertwining_z = 0.0;    ///< |Π_V T* - M_z* Π_V| on rows 0..N
  double symbol_product = 0.0;    ///< |M_Φ M_Ψ - M_z|
  double v_isometry = 0.0;        ///< |V*V - I|
  double isometry_defect = 0.0;   ///< max_h | |h|^2 - |Π_V h|^2 - |T^{*(N+1)} h|^2 |
  std::vector<double> tail_norms; ///< |T^{*(N+1)} e_j|^2 per basis vector
  std::vector<double> defects;    ///< |e_j|^2 - |Π_V e_j|^2 per basis vector

  double max_intertwining() const noexcept;
};

struct DilationPackage {
  TruncatedHardy space;
  CMat v;     ///< D_{T*} coordinates -> E, isometric
  CMat pi_v;  ///< (N+1) e x n
  CMat m_phi;
  CMat m_psi;
  CMat m_z;
  DilationResiduals residuals;
};

/// Throws NotPure if T1 T2 is not pure, TripleMismatch if the triple fails
/// the unitary relations for this pair.
DilationPackage dilation_map_pair(const CommutingPair& pair, const BCLTriple& triple, int n,
                                  const Tolerances& tol = {});

/// Purity of the adjoint compression of M_symbol to the degree-N section.
/// The spectral radius is estimated by repeated normalized squaring
/// (|X^{2^j}|^{2^{-j}}), which is insensitive to the large Jordan blocks the
/// block-triangular compression carries.
PurityCertificate compression_purity_check(const PencilSymbol& symbol, int n = 6,
                                           const Tolerances& tol = {});

/// Spectral radius by normalized repeated squaring.
double gelfand_radius(const CMat& x, int max_squarings = 80);

struct MinimalityReport {
  std::vector<Index> ranks;     ///< rank of the degree <= N' block, N' = 0..N
  std::vector<Index> expected;  ///< (N'+1) dim D_{T*}
  bool minimal = false;
};

MinimalityReport minimality_check(const Contraction& t, int n, const Tolerances& tol = {});

}  // namespace pdil
