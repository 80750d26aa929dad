#include "pdil/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pdil {

namespace {

CMat defect_root(const CMat& m, const Tolerances& tol) {
  const double scale = std::max(1.0, operator_norm(m));
  // |T| <= 1 + eps only guarantees I - T*T >= -(2 eps + eps^2).
  const double floor = std::max(3.0 * tol.residual_tol, tol.rank_tol * scale);
  return psd_sqrt(m, floor, tol.rank_tol * scale, tol.residual_tol * scale);
}

}  // namespace

Contraction make_contraction(const CMat& t, const Tolerances& tol) {
  if (t.rows() != t.cols() || t.rows() == 0) {
    std::ostringstream os;
    os << "contraction must be a nonempty square matrix, got " << t.rows() << "x" << t.cols();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (!all_finite(t)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  const double norm = operator_norm(t);
  if (norm > 1.0 + tol.residual_tol) {
    std::ostringstream os;
    os << "operator norm " << norm << " exceeds 1 + " << tol.residual_tol;
    throw Error(ErrorCode::NotContraction, os.str());
  }
  const Index n = t.rows();
  Contraction c;
  c.t = t;
  c.defect = defect_root(identity(n) - t.adjoint() * t, tol);
  c.codefect = defect_root(identity(n) - t * t.adjoint(), tol);
  c.defect_basis = range_basis(c.defect, tol);
  c.codefect_basis = range_basis(c.codefect, tol);
  return c;
}

CommutingPair make_commuting_pair(const CMat& t1, const CMat& t2, const Tolerances& tol,
                                  PairCheck check) {
  if (t1.rows() != t2.rows() || t1.cols() != t2.cols()) {
    throw Error(ErrorCode::InvalidArgument, "pair members have different shapes");
  }
  CommutingPair pair{make_contraction(t1, tol), make_contraction(t2, tol), t1 * t2};
  if (check == PairCheck::Strict) {
    const DefectIdentityReport rep = check_defect_identities(pair, tol);
    if (rep.flagged) {
      std::ostringstream os;
      os << "pair does not commute: commutator " << rep.commutator << ", defect identity "
         << rep.operator_residual;
      throw Error(ErrorCode::HypothesisViolated, os.str());
    }
  }
  return pair;
}

std::string_view to_string(Purity p) noexcept {
  switch (p) {
    case Purity::Pure: return "Pure";
    case Purity::NotPure: return "NotPure";
    case Purity::Borderline: return "Borderline";
  }
  return "Unknown";
}

Purity classify_radius(double radius, double margin) noexcept {
  if (radius < 1.0 - margin) return Purity::Pure;
  if (radius >= 1.0 - 0.1 * margin) return Purity::NotPure;
  return Purity::Borderline;
}

PurityCertificate certify_pure(const CMat& t, int m_max, const Tolerances& tol) {
  if (m_max < 0) throw Error(ErrorCode::InvalidArgument, "m_max must be nonnegative");
  PurityCertificate cert;
  cert.margin = tol.purity_margin;
  cert.spectral_radius = spectral_radius(t);
  cert.verdict = classify_radius(cert.spectral_radius, tol.purity_margin);
  cert.decay.reserve(static_cast<std::size_t>(m_max));
  const CMat adj = t.adjoint();
  CMat power = adj;
  for (int m = 1; m <= m_max; ++m) {
    cert.decay.push_back(operator_norm(power));
    if (m < m_max) power = power * adj;
  }
  return cert;
}

SubspaceBasis isometric_part(const CMat& t, bool adjoint, const Tolerances& tol) {
  if (t.rows() != t.cols()) throw Error(ErrorCode::InvalidArgument, "isometric_part needs a square matrix");
  const Index n = t.rows();
  const CMat x = adjoint ? CMat(t.adjoint()) : t;
  CMat stack(n * n, n);
  CMat power = identity(n);
  for (Index k = 0; k < n; ++k) {
    power = x * power;
    stack.middleRows(k * n, n) = identity(n) - power.adjoint() * power;
  }
  const double cutoff = tol.rank_tol * std::max(1.0, operator_norm(stack));
  return kernel_basis_abs(stack, cutoff);
}

bool certify_cnc(const CMat& t, const Tolerances& tol) {
  return isometric_part(t, true, tol).dim() == 0;
}

bool certify_cnu(const CMat& t, const Tolerances& tol) {
  return spectral_radius(t) < 1.0 - tol.purity_margin;
}

Contraction halmos_mclaughlin_extension(const Contraction& t, const Tolerances& tol) {
  const Index n = t.dim();
  CMat m = CMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = t.t;
  m.topRightCorner(n, n) = t.codefect;
  return make_contraction(m, tol);
}

CMat nilpotent_shift(Index n) {
  CMat j = CMat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) j(i + 1, i) = 1.0;
  return j;
}

namespace {

CMat eval_univariate(const std::vector<cplx>& coeffs, const CMat& m) {
  CMat acc = CMat::Zero(m.rows(), m.cols());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * m;
    acc.diagonal().array() += *it;
  }
  return acc;
}

}  // namespace

CommutingPair random_commuting_pure_pair(std::uint64_t seed, Index dim, double shrink,
                                         const Tolerances& tol) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dim must be at least 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error(ErrorCode::InvalidArgument, "shrink must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> degree(1, 3);
  auto draw = [&] { return cplx(normal(rng), normal(rng)) / std::sqrt(2.0); };

  CMat m(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) m(i, j) = draw();
  m /= std::sqrt(static_cast<double>(dim));

  auto draw_poly = [&] {
    std::vector<cplx> c(static_cast<std::size_t>(degree(rng)) + 1);
    for (auto& v : c) v = draw();
    return c;
  };
  const auto p = draw_poly();
  const auto q = draw_poly();
  CMat t1 = eval_univariate(p, m);
  CMat t2 = eval_univariate(q, m);
  const double scale = shrink / std::max({1.0, operator_norm(t1), operator_norm(t2)});
  t1 *= scale;
  t2 *= scale;
  return make_commuting_pair(t1, t2, tol);
}

CommutingPair truncated_shift_pair(Index n, int a, int b, const Tolerances& tol) {
  if (n < 2 || a < 1 || b < 1 || a >= n || b >= n) {
    std::ostringstream os;
    os << "need n >= 2 and 1 <= a, b < n; got n=" << n << " a=" << a << " b=" << b;
    throw Error(ErrorCode::InvalidPowers, os.str());
  }
  const CMat j = nilpotent_shift(n);
  return make_commuting_pair(matrix_power(j, a), matrix_power(j, b), tol);
}

DefectIdentityReport check_defect_identities(const CommutingPair& pair, const Tolerances& tol) {
  const Index n = pair.dim();
  const CMat& t1 = pair.t1.t;
  const CMat& t2 = pair.t2.t;
  const CMat id = identity(n);
  const CMat q1 = id - t1 * t1.adjoint();
  const CMat q2 = id - t2 * t2.adjoint();
  DefectIdentityReport rep;
  rep.operator_residual = operator_norm(t2 * q1 * t2.adjoint() + q2 - q1 - t1 * q2 * t1.adjoint());
  const CMat& d1 = pair.t1.codefect;
  const CMat& d2 = pair.t2.codefect;
  const CMat lhs1 = d1 * t2.adjoint();
  const CMat rhs2 = d2 * t1.adjoint();
  for (Index j = 0; j < n; ++j) {
    const double lhs = lhs1.col(j).squaredNorm() + d2.col(j).squaredNorm();
    const double rhs = d1.col(j).squaredNorm() + rhs2.col(j).squaredNorm();
    rep.form_residual = std::max(rep.form_residual, std::abs(lhs - rhs));
  }
  rep.commutator = operator_norm(t1 * t2 - t2 * t1);
  rep.flagged = rep.operator_residual > tol.residual_tol || rep.form_residual > tol.residual_tol ||
                rep.commutator > tol.residual_tol;
  return rep;
}

bool is_partial_isometry(const CMat& x, const Tolerances& tol) {
  return partial_isometry_residual(x) <= tol.residual_tol;
}

Index wandering_rank(const CMat& x, const Tolerances& tol) {
  if (x.rows() != x.cols()) throw Error(ErrorCode::InvalidArgument, "wandering_rank needs a square matrix");
  const Index n = x.rows();
  CMat span = kernel_basis(x.adjoint(), tol).basis;
  CMat fresh = span;
  // Block Arnoldi: only the directions added last can contribute new ones.
  for (Index k = 1; k < n && fresh.cols() > 0 && span.cols() < n; ++k) {
    CMat next = x * fresh;
    next -= span * (span.adjoint() * next);
    next -= span * (span.adjoint() * next);
    fresh = range_basis_abs(next, tol.residual_tol).basis;
    CMat grown(n, span.cols() + fresh.cols());
    grown << span, fresh;
    span = std::move(grown);
  }
  return span.cols();
}

}  // namespace pdil
