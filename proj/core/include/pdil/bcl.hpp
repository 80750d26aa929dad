#pragma once

// Complete BCL triples (E, U, P) for commuting pairs, worked in defect
// coordinates: E = D_{T1*} + D_{T2*} with each summand expressed in the
// orthonormal codefect basis of its contraction.

#include <string>
#include <utility>
#include <vector>

#include "pdil/contraction.hpp"

namespace pdil {

struct BCLTriple {
  Index d1 = 0;
  Index d2 = 0;
  CMat u;
  CMat p;  ///< projection onto the second summand

  Index e_dim() const noexcept { return d1 + d2; }
};

/// Throws InvalidArgument unless u is unitary, p the second-summand projection
/// and the dimensions agree.
void validate_triple(const BCLTriple& triple, const Tolerances& tol = {});

/// Projection diag(0_{d1}, I_{d2}).
CMat second_summand_projection(Index d1, Index d2);

/// Defect-coordinate images of H used throughout:
///   x = [Q1* D1 T2*; Q2* D2]   (vectors spanning the domain of the isometry)
///   y = [Q1* D1; Q2* D2 T1*]   (their images)
/// where Di is the codefect of Ti and Qi its codefect basis.
struct DefectCoordinates {
  CMat d1_h;     ///< Q1* D1
  CMat d1_t2;    ///< Q1* D1 T2*
  CMat d2_h;     ///< Q2* D2
  CMat d2_t1;    ///< Q2* D2 T1*
  CMat x;
  CMat y;
};

DefectCoordinates defect_coordinates(const CommutingPair& pair);

BCLTriple build_complete_bcl_triple(const CommutingPair& pair, const Tolerances& tol = {},
                                    std::vector<std::string>* log = nullptr);

struct PencilSymbol {
  CMat c0;
  CMat c1;

  CMat operator()(cplx z) const { return c0 + z * c1; }
  Index dim() const noexcept { return c0.rows(); }
};

struct BclSymbols {
  PencilSymbol phi;  ///< (P + zP⊥) U*
  PencilSymbol psi;  ///< U (P⊥ + zP)
  double product_residual = 0.0;  ///< max |Φ(z)Ψ(z) - zI|, |Ψ(z)Φ(z) - zI| over 8 points
};

BclSymbols bcl_symbols(const BCLTriple& triple);

/// max over 8 points z = r e^{iθ}, r in {0.5, 1} of |symbol(z)|.
double sampled_sup_norm(const PencilSymbol& symbol);

struct BlockDecomposition {
  CMat a;  ///< d1 x d1
  CMat b;  ///< d1 x d2
  CMat c;  ///< d2 x d1
  CMat d;  ///< d2 x d2

  CMat assemble() const;
};

BlockDecomposition block_decomposition(const BCLTriple& triple);

struct RelationReport {
  std::vector<double> residuals;  ///< one entry per identity
  double max_residual = 0.0;
  bool flagged = false;
};

/// The four identities U x = y and U* y = x written blockwise, evaluated on
/// the standard basis of H (max column norm of each residual).
RelationReport verify_unitary_relations(const BCLTriple& triple, const CommutingPair& pair,
                                        const Tolerances& tol = {});

struct RecurrenceReport {
  std::vector<double> a_side;  ///< residual of the A* recurrence for m = 1..m_max
  std::vector<double> d_side;  ///< residual of the D recurrence for m = 1..m_max
  double max_residual = 0.0;
  bool flagged = false;
};

RecurrenceReport verify_recurrence(const BCLTriple& triple, const CommutingPair& pair,
                                   int m_max, const Tolerances& tol = {});

struct TransferValue {
  CMat tau;
  double isometry_residual = 0.0;
  double resolvent_condition = 1.0;
};

/// τ(z) = A + zB(I - zD)^{-1}C for |z| < 1, with the residual of
/// I - τ*τ = (1 - |z|^2) C*(I - z̄D*)^{-1}(I - zD)^{-1}C.
TransferValue transfer_function(const BlockDecomposition& blocks, cplx z,
                                const Tolerances& tol = {});

/// (A, D*): the compressions P⊥UP⊥ on ran P⊥ and PU*P on ran P.
std::pair<CMat, CMat> fringe_compressions(const BCLTriple& triple);

struct BclPurity {
  PurityCertificate a_block;       ///< decides purity of M_Ψ
  PurityCertificate d_star_block;  ///< decides purity of M_Φ

  bool both_pure() const noexcept {
    return a_block.verdict == Purity::Pure && d_star_block.verdict == Purity::Pure;
  }
};

BclPurity certify_bcl_pure(const BCLTriple& triple, const Tolerances& tol = {}, int m_max = 0);

/// (c.n.c.(A), c.n.c.(D*)).
std::pair<bool, bool> certify_cnc_blocks(const BCLTriple& triple, const Tolerances& tol = {});

struct WanderingReport {
  bool phi = false;
  bool psi = false;
  double phi_partial_isometry = 0.0;
  double psi_partial_isometry = 0.0;
  Index phi_rank = 0;
  Index psi_rank = 0;
};

/// Partial-isometry and wandering-subspace checks on Φ(0) = PU* and Ψ(0) = UP⊥.
WanderingReport wandering_check_symbols(const BCLTriple& triple, const Tolerances& tol = {});

/// Triple W = [[0, J], [V, 0]] for pairs with equal codefects, where V maps
/// D1 T2* h to D2 T1* h and J identifies the two codefect bases.
/// Throws HypothesisViolated if |D_{T1*} - D_{T2*}| > residual_tol.
BCLTriple build_offdiagonal_triple(const CommutingPair& pair, const Tolerances& tol = {});

/// max over an orthonormal basis h of ker T1* of |A^{*m} Q1* D1 h|.
double kernel_decay(const BCLTriple& triple, const CommutingPair& pair, int m,
                    const Tolerances& tol = {});

}  // namespace pdil
