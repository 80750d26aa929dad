#include "pdil/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace pdil {

namespace {

void require_degree(int n) {
  if (n < 1) {
    std::ostringstream os;
    os << "truncation degree must be at least 1, got " << n;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

void require_pure(const CMat& t, const Tolerances& tol, const char* what) {
  const PurityCertificate cert = certify_pure(t, 0, tol);
  if (cert.verdict != Purity::Pure) {
    std::ostringstream os;
    os << what << " has spectral radius " << cert.spectral_radius << " (" << to_string(cert.verdict)
       << ")";
    throw Error(ErrorCode::NotPure, os.str());
  }
}

}  // namespace

CMat multiplication_matrix(const PencilSymbol& symbol, int n) {
  require_degree(n);
  const Index d = symbol.dim();
  CMat m = CMat::Zero((n + 1) * d, (n + 1) * d);
  for (int k = 0; k <= n; ++k) {
    m.block(k * d, k * d, d, d) = symbol.c0;
    if (k < n) m.block((k + 1) * d, k * d, d, d) = symbol.c1;
  }
  return m;
}

CMat shift_matrix(Index fiber_dim, int n) {
  return multiplication_matrix({CMat::Zero(fiber_dim, fiber_dim), identity(fiber_dim)}, n);
}

CMat dilation_map_single(const Contraction& t, int n, const Tolerances& tol) {
  require_degree(n);
  require_pure(t.t, tol, "contraction");
  const Index r = t.codefect_basis.dim();
  const Index h = t.dim();
  CMat pi(static_cast<Index>(n + 1) * r, h);
  CMat block = t.codefect_basis.basis.adjoint() * t.codefect;
  const CMat ts = t.t.adjoint();
  for (int k = 0; k <= n; ++k) {
    pi.middleRows(k * r, r) = block;
    block = block * ts;
  }
  return pi;
}

double DilationResiduals::max_intertwining() const noexcept {
  return std::max({intertwining_phi, intertwining_psi, intertwining_z});
}

namespace {

// Stacked residual rows k = 0..N of  Π T* - (c0* Π_k + c1* Π_{k+1}),
// where ext carries N+2 coefficient blocks.
double intertwining_residual(const CMat& ext, Index e, int n, const CMat& ts,
                             const PencilSymbol& symbol) {
  const CMat c0s = symbol.c0.adjoint();
  const CMat c1s = symbol.c1.adjoint();
  CMat res(static_cast<Index>(n + 1) * e, ext.cols());
  for (int k = 0; k <= n; ++k) {
    const auto cur = ext.middleRows(k * e, e);
    const auto next = ext.middleRows((k + 1) * e, e);
    res.middleRows(k * e, e) = cur * ts - c0s * cur - c1s * next;
  }
  return operator_norm(res);
}

}  // namespace

DilationPackage dilation_map_pair(const CommutingPair& pair, const BCLTriple& triple, int n,
                                  const Tolerances& tol) {
  require_degree(n);
  require_pure(pair.product, tol, "product T1 T2");
  const RelationReport rel = verify_unitary_relations(triple, pair, tol);
  if (rel.flagged) {
    std::ostringstream os;
    os << "triple violates the defining relations, max residual " << rel.max_residual;
    throw Error(ErrorCode::TripleMismatch, os.str());
  }

  const Contraction prod = make_contraction(pair.product, tol);
  const Index e = triple.e_dim();
  const Index h = pair.dim();
  const Index r = prod.codefect_basis.dim();
  const CMat z = prod.codefect_basis.basis.adjoint() * prod.codefect;
  const DefectCoordinates dc = defect_coordinates(pair);

  DilationPackage pkg;
  pkg.space = {n, e};
  pkg.v = dc.y * pseudo_inverse(z, tol.rank_tol);

  const CMat pi_t = dilation_map_single(prod, n + 1, tol);
  CMat ext(static_cast<Index>(n + 2) * e, h);
  for (int k = 0; k <= n + 1; ++k) ext.middleRows(k * e, e) = pkg.v * pi_t.middleRows(k * r, r);
  pkg.pi_v = ext.topRows(static_cast<Index>(n + 1) * e);

  const BclSymbols sym = bcl_symbols(triple);
  pkg.m_phi = multiplication_matrix(sym.phi, n);
  pkg.m_psi = multiplication_matrix(sym.psi, n);
  pkg.m_z = shift_matrix(e, n);

  DilationResiduals& res = pkg.residuals;
  const PencilSymbol shift{CMat::Zero(e, e), identity(e)};
  res.intertwining_phi = intertwining_residual(ext, e, n, pair.t1.t.adjoint(), sym.phi);
  res.intertwining_psi = intertwining_residual(ext, e, n, pair.t2.t.adjoint(), sym.psi);
  res.intertwining_z = intertwining_residual(ext, e, n, pair.product.adjoint(), shift);

  // M_Φ M_Ψ is block lower-tridiagonal Toeplitz; compare its three distinct
  // blocks with those of M_z.
  const CMat& f0 = sym.phi.c0;
  const CMat& f1 = sym.phi.c1;
  const CMat& g0 = sym.psi.c0;
  const CMat& g1 = sym.psi.c1;
  res.symbol_product = std::max({operator_norm(f0 * g0), operator_norm(f1 * g0 + f0 * g1 - identity(e)),
                                 n >= 2 ? operator_norm(f1 * g1) : 0.0});

  if (r > 0) res.v_isometry = operator_norm(pkg.v.adjoint() * pkg.v - identity(r));

  const CMat tail = matrix_power(pair.product.adjoint(), n + 1);
  for (Index j = 0; j < h; ++j) {
    const double defect = 1.0 - pkg.pi_v.col(j).squaredNorm();
    const double t2 = tail.col(j).squaredNorm();
    res.defects.push_back(defect);
    res.tail_norms.push_back(t2);
    res.isometry_defect = std::max(res.isometry_defect, std::abs(defect - t2));
  }
  return pkg;
}

double gelfand_radius(const CMat& x, int max_squarings) {
  if (x.size() == 0) return 0.0;
  const double s = x.norm();
  if (s == 0.0) return 0.0;
  CMat y = x / s;
  double log_radius = std::log(s);
  double weight = 0.5;
  std::vector<double> history;
  for (int j = 0; j < max_squarings; ++j) {
    CMat y2 = y * y;
    const double n2 = y2.norm();
    if (n2 == 0.0 || !std::isfinite(n2)) {
      // An exactly nilpotent matrix vanishes by power dim. A later collapse
      // is underflow eating a slowly decaying entry; report the estimate from
      // before the loss.
      const double power = std::ldexp(1.0, j + 1);
      if (power <= 2.0 * static_cast<double>(x.rows()) || history.empty()) return 0.0;
      return history[history.size() >= 3 ? history.size() - 3 : 0];
    }
    const double inc = weight * std::log(n2);
    log_radius += inc;
    history.push_back(std::exp(log_radius));
    y = y2 / n2;
    weight *= 0.5;
    if (j >= 8 && std::abs(inc) < 1e-17) break;
  }
  return std::exp(log_radius);
}

PurityCertificate compression_purity_check(const PencilSymbol& symbol, int n,
                                           const Tolerances& tol) {
  const CMat x = multiplication_matrix(symbol, n).adjoint();
  PurityCertificate cert;
  cert.margin = tol.purity_margin;
  cert.spectral_radius = gelfand_radius(x);
  cert.verdict = classify_radius(cert.spectral_radius, tol.purity_margin);
  CMat power = x;
  for (int m = 1; m <= 2 * (n + 1); ++m) {
    cert.decay.push_back(operator_norm(power));
    power = power * x;
  }
  return cert;
}

MinimalityReport minimality_check(const Contraction& t, int n, const Tolerances& tol) {
  const CMat pi = dilation_map_single(t, n, tol);
  const Index r = t.codefect_basis.dim();
  const Index h = t.dim();
  MinimalityReport rep;
  rep.minimal = true;
  for (int deg = 0; deg <= n; ++deg) {
    const Index blocks = deg + 1;
    CMat stack = CMat::Zero(blocks * r, blocks * h);
    for (Index m = 0; m < blocks; ++m)
      for (Index k = m; k < blocks; ++k)
        stack.block(k * r, m * h, r, h) = pi.middleRows((k - m) * r, r);
    const Index rank = stack.size() == 0 ? 0 : range_basis(stack, tol).dim();
    rep.ranks.push_back(rank);
    rep.expected.push_back(blocks * r);
    if (rank != blocks * r) rep.minimal = false;
  }
  return rep;
}

}  // namespace pdil
