#include "pdil/bcl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pdil {

namespace {

double max_column_norm(const CMat& m) {
  double r = 0.0;
  for (Index j = 0; j < m.cols(); ++j) r = std::max(r, m.col(j).norm());
  return r;
}

CMat vstack(const CMat& top, const CMat& bottom) {
  CMat out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

std::vector<cplx> symbol_sample_points() {
  std::vector<cplx> pts;
  for (int k = 0; k < 8; ++k) {
    const double r = (k % 2 == 0) ? 1.0 : 0.5;
    pts.push_back(std::polar(r, 2.0 * std::numbers::pi * k / 8.0 + 0.1));
  }
  return pts;
}

}  // namespace

CMat second_summand_projection(Index d1, Index d2) {
  CMat p = CMat::Zero(d1 + d2, d1 + d2);
  p.bottomRightCorner(d2, d2).setIdentity();
  return p;
}

void validate_triple(const BCLTriple& triple, const Tolerances& tol) {
  const Index e = triple.e_dim();
  if (triple.d1 < 0 || triple.d2 < 0 || triple.u.rows() != e || triple.u.cols() != e ||
      triple.p.rows() != e || triple.p.cols() != e) {
    throw Error(ErrorCode::InvalidArgument, "triple dimensions are inconsistent");
  }
  const double ures = unitarity_residual(triple.u);
  if (ures > tol.residual_tol) {
    std::ostringstream os;
    os << "U has unitarity residual " << ures;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const double pres = operator_norm(triple.p - second_summand_projection(triple.d1, triple.d2));
  if (pres > tol.residual_tol) {
    std::ostringstream os;
    os << "P differs from the second-summand projection by " << pres;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

DefectCoordinates defect_coordinates(const CommutingPair& pair) {
  const CMat& q1 = pair.t1.codefect_basis.basis;
  const CMat& q2 = pair.t2.codefect_basis.basis;
  DefectCoordinates dc;
  dc.d1_h = q1.adjoint() * pair.t1.codefect;
  dc.d2_h = q2.adjoint() * pair.t2.codefect;
  dc.d1_t2 = dc.d1_h * pair.t2.t.adjoint();
  dc.d2_t1 = dc.d2_h * pair.t1.t.adjoint();
  dc.x = vstack(dc.d1_t2, dc.d2_h);
  dc.y = vstack(dc.d1_h, dc.d2_t1);
  return dc;
}

BCLTriple build_complete_bcl_triple(const CommutingPair& pair, const Tolerances& tol,
                                    std::vector<std::string>* log) {
  auto note = [&](const std::string& s) {
    if (log) log->push_back(s);
  };
  BCLTriple triple;
  triple.d1 = pair.t1.codefect_basis.dim();
  triple.d2 = pair.t2.codefect_basis.dim();
  const Index e = triple.e_dim();
  {
    std::ostringstream os;
    os << "defect dimensions d1=" << triple.d1 << " d2=" << triple.d2;
    note(os.str());
  }

  const DefectCoordinates dc = defect_coordinates(pair);
  const SubspaceBasis dom = range_basis(dc.x, tol);
  const SubspaceBasis cod = range_basis(dc.y, tol);
  {
    std::ostringstream os;
    os << "domain rank " << dom.dim() << ", codomain rank " << cod.dim() << " in dimension " << e;
    note(os.str());
  }
  if (dom.dim() != cod.dim()) {
    std::ostringstream os;
    os << "domain rank " << dom.dim() << " and codomain rank " << cod.dim()
       << " differ; rank tolerance too coarse or fine";
    throw Error(ErrorCode::ExtensionFailure, os.str());
  }

  const CMat action = cod.basis.adjoint() * dc.y * pseudo_inverse(dc.x, tol.rank_tol) * dom.basis;
  try {
    triple.u = extend_isometry_to_unitary(dom, cod, action, e, tol);
  } catch (const Error& err) {
    throw Error(ErrorCode::ExtensionFailure, err.what());
  }
  triple.p = second_summand_projection(triple.d1, triple.d2);
  {
    std::ostringstream os;
    os << "unitary extension residual " << unitarity_residual(triple.u);
    note(os.str());
  }
  return triple;
}

BclSymbols bcl_symbols(const BCLTriple& triple) {
  const Index e = triple.e_dim();
  const CMat& u = triple.u;
  const CMat& p = triple.p;
  const CMat pperp = identity(e) - p;
  BclSymbols s;
  s.phi = {p * u.adjoint(), pperp * u.adjoint()};
  s.psi = {u * pperp, u * p};
  for (cplx z : symbol_sample_points()) {
    const CMat f = s.phi(z);
    const CMat g = s.psi(z);
    const CMat zi = z * identity(e);
    s.product_residual = std::max({s.product_residual, operator_norm(f * g - zi),
                                   operator_norm(g * f - zi)});
  }
  return s;
}

double sampled_sup_norm(const PencilSymbol& symbol) {
  double r = 0.0;
  for (cplx z : symbol_sample_points()) r = std::max(r, operator_norm(symbol(z)));
  return r;
}

CMat BlockDecomposition::assemble() const {
  const Index d1 = a.rows();
  const Index d2 = d.rows();
  CMat u(d1 + d2, d1 + d2);
  u.topLeftCorner(d1, d1) = a;
  u.topRightCorner(d1, d2) = b;
  u.bottomLeftCorner(d2, d1) = c;
  u.bottomRightCorner(d2, d2) = d;
  return u;
}

BlockDecomposition block_decomposition(const BCLTriple& triple) {
  const Index d1 = triple.d1;
  const Index d2 = triple.d2;
  const CMat& u = triple.u;
  return {u.topLeftCorner(d1, d1), u.topRightCorner(d1, d2), u.bottomLeftCorner(d2, d1),
          u.bottomRightCorner(d2, d2)};
}

namespace {

void require_match(const BCLTriple& triple, const CommutingPair& pair) {
  if (triple.d1 != pair.t1.codefect_basis.dim() || triple.d2 != pair.t2.codefect_basis.dim()) {
    std::ostringstream os;
    os << "triple summands (" << triple.d1 << ", " << triple.d2
       << ") do not match the pair's defect dimensions (" << pair.t1.codefect_basis.dim() << ", "
       << pair.t2.codefect_basis.dim() << ")";
    throw Error(ErrorCode::TripleMismatch, os.str());
  }
}

}  // namespace

RelationReport verify_unitary_relations(const BCLTriple& triple, const CommutingPair& pair,
                                        const Tolerances& tol) {
  require_match(triple, pair);
  const BlockDecomposition bl = block_decomposition(triple);
  const DefectCoordinates dc = defect_coordinates(pair);
  RelationReport rep;
  rep.residuals = {
      max_column_norm(dc.d1_h - bl.a * dc.d1_t2 - bl.b * dc.d2_h),
      max_column_norm(dc.d2_t1 - bl.c * dc.d1_t2 - bl.d * dc.d2_h),
      max_column_norm(dc.d2_h - bl.d.adjoint() * dc.d2_t1 - bl.b.adjoint() * dc.d1_h),
      max_column_norm(dc.d1_t2 - bl.c.adjoint() * dc.d2_t1 - bl.a.adjoint() * dc.d1_h),
  };
  rep.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
  rep.flagged = !(rep.max_residual <= tol.residual_tol);
  return rep;
}

RecurrenceReport verify_recurrence(const BCLTriple& triple, const CommutingPair& pair, int m_max,
                                   const Tolerances& tol) {
  if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be at least 1");
  require_match(triple, pair);
  const BlockDecomposition bl = block_decomposition(triple);
  const DefectCoordinates dc = defect_coordinates(pair);
  const CMat t1s = pair.t1.t.adjoint();
  const CMat t2s = pair.t2.t.adjoint();
  const CMat as = bl.a.adjoint();
  const CMat cs = bl.c.adjoint();

  // Powers T2*^k and T1*^k, k = 0..m_max.
  std::vector<CMat> t2p{identity(pair.dim())}, t1p{identity(pair.dim())};
  for (int k = 1; k <= m_max; ++k) {
    t2p.push_back(t2p.back() * t2s);
    t1p.push_back(t1p.back() * t1s);
  }
  std::vector<CMat> asp{identity(triple.d1)}, dp{identity(triple.d2)};
  for (int k = 1; k <= m_max; ++k) {
    asp.push_back(asp.back() * as);
    dp.push_back(dp.back() * bl.d);
  }

  const CMat lhs_a = cs * dc.d2_t1;   // C* Q2*D2T1*
  const CMat lhs_d = bl.c * dc.d1_t2;  // C Q1*D1T2*
  RecurrenceReport rep;
  for (int m = 1; m <= m_max; ++m) {
    CMat ra = asp[m] * dc.d1_h - dc.d1_h * t2p[m];
    CMat rd = dp[m] * dc.d2_h - dc.d2_h * t1p[m];
    for (int k = 0; k < m; ++k) {
      ra += asp[k] * lhs_a * t2p[m - 1 - k];
      rd += dp[k] * lhs_d * t1p[m - 1 - k];
    }
    rep.a_side.push_back(max_column_norm(ra));
    rep.d_side.push_back(max_column_norm(rd));
    rep.max_residual = std::max({rep.max_residual, rep.a_side.back(), rep.d_side.back()});
  }
  rep.flagged = !(rep.max_residual <= tol.residual_tol);
  return rep;
}

TransferValue transfer_function(const BlockDecomposition& blocks, cplx z, const Tolerances& tol) {
  if (!(std::abs(z) < 1.0)) {
    std::ostringstream os;
    os << "transfer function needs |z| < 1, got |z| = " << std::abs(z);
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const Index d1 = blocks.a.rows();
  const Index d2 = blocks.d.rows();
  TransferValue out;
  CMat resolved_c = blocks.c;  // (I - zD)^{-1} C
  if (d2 > 0) {
    const CMat m = identity(d2) - z * blocks.d;
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    out.resolvent_condition =
        sv(d2 - 1) > 0.0 ? sv(0) / sv(d2 - 1) : std::numeric_limits<double>::infinity();
    if (!(out.resolvent_condition <= 1.0 / tol.rank_tol)) {
      std::ostringstream os;
      os << "condition number of I - zD is " << out.resolvent_condition << " at z = " << z;
      throw Error(ErrorCode::NearSingularResolvent, os.str());
    }
    resolved_c = Eigen::PartialPivLU<CMat>(m).solve(blocks.c);
  }
  out.tau = blocks.a + z * blocks.b * resolved_c;
  if (d1 > 0) {
    const double scale = 1.0 - std::norm(z);
    const CMat lhs = identity(d1) - out.tau.adjoint() * out.tau;
    out.isometry_residual = operator_norm(lhs - scale * resolved_c.adjoint() * resolved_c);
  }
  return out;
}

std::pair<CMat, CMat> fringe_compressions(const BCLTriple& triple) {
  const BlockDecomposition bl = block_decomposition(triple);
  return {bl.a, bl.d.adjoint()};
}

BclPurity certify_bcl_pure(const BCLTriple& triple, const Tolerances& tol, int m_max) {
  const auto [a, ds] = fringe_compressions(triple);
  auto steps = [&](Index n) { return m_max > 0 ? m_max : static_cast<int>(60 * std::max<Index>(1, n)); };
  return {certify_pure(a, steps(a.rows()), tol), certify_pure(ds, steps(ds.rows()), tol)};
}

std::pair<bool, bool> certify_cnc_blocks(const BCLTriple& triple, const Tolerances& tol) {
  const auto [a, ds] = fringe_compressions(triple);
  return {certify_cnc(a, tol), certify_cnc(ds, tol)};
}

WanderingReport wandering_check_symbols(const BCLTriple& triple, const Tolerances& tol) {
  const Index e = triple.e_dim();
  const CMat phi0 = triple.p * triple.u.adjoint();
  const CMat psi0 = triple.u * (identity(e) - triple.p);
  WanderingReport rep;
  rep.phi_partial_isometry = partial_isometry_residual(phi0);
  rep.psi_partial_isometry = partial_isometry_residual(psi0);
  rep.phi_rank = wandering_rank(phi0, tol);
  rep.psi_rank = wandering_rank(psi0, tol);
  rep.phi = rep.phi_partial_isometry <= tol.residual_tol && rep.phi_rank == e;
  rep.psi = rep.psi_partial_isometry <= tol.residual_tol && rep.psi_rank == e;
  return rep;
}

BCLTriple build_offdiagonal_triple(const CommutingPair& pair, const Tolerances& tol) {
  const double gap = operator_norm(pair.t1.codefect - pair.t2.codefect);
  if (gap > tol.residual_tol) {
    std::ostringstream os;
    os << "codefect operators differ by " << gap << " > " << tol.residual_tol;
    throw Error(ErrorCode::HypothesisViolated, os.str());
  }
  const Index d1 = pair.t1.codefect_basis.dim();
  const Index d2 = pair.t2.codefect_basis.dim();
  if (d1 != d2) {
    std::ostringstream os;
    os << "equal codefects but numerical ranks " << d1 << " and " << d2;
    throw Error(ErrorCode::ExtensionFailure, os.str());
  }
  const Index d = d1;
  const DefectCoordinates dc = defect_coordinates(pair);
  const SubspaceBasis dom = range_basis(dc.d1_t2, tol);
  const SubspaceBasis cod = range_basis(dc.d2_t1, tol);
  if (dom.dim() != cod.dim()) {
    std::ostringstream os;
    os << "ranks of D1 T2* and D2 T1* differ: " << dom.dim() << " vs " << cod.dim();
    throw Error(ErrorCode::ExtensionFailure, os.str());
  }
  const CMat action =
      cod.basis.adjoint() * dc.d2_t1 * pseudo_inverse(dc.d1_t2, tol.rank_tol) * dom.basis;
  CMat lower;
  try {
    lower = extend_isometry_to_unitary(dom, cod, action, d, tol);
  } catch (const Error& err) {
    throw Error(ErrorCode::ExtensionFailure, err.what());
  }
  const CMat ident = pair.t1.codefect_basis.basis.adjoint() * pair.t2.codefect_basis.basis;

  BCLTriple triple;
  triple.d1 = d;
  triple.d2 = d;
  triple.u = CMat::Zero(2 * d, 2 * d);
  triple.u.topRightCorner(d, d) = ident;
  triple.u.bottomLeftCorner(d, d) = lower;
  triple.p = second_summand_projection(d, d);
  return triple;
}

double kernel_decay(const BCLTriple& triple, const CommutingPair& pair, int m,
                    const Tolerances& tol) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "power must be nonnegative");
  require_match(triple, pair);
  const SubspaceBasis ker = kernel_basis(pair.t1.t.adjoint(), tol);
  if (ker.dim() == 0) return 0.0;
  const CMat eta = pair.t1.codefect_basis.basis.adjoint() * pair.t1.codefect * ker.basis;
  const CMat as = block_decomposition(triple).a.adjoint();
  return max_column_norm(matrix_power(as, m) * eta);
}

}  // namespace pdil
