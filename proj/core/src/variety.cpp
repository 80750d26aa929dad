#include "pdil/variety.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace pdil {

VarietyGrid VarietyGrid::geometric(int n_radii, int angles, double r_max) {
  if (n_radii < 1 || angles < 1 || !(r_max > 0.0 && r_max < 1.0)) {
    std::ostringstream os;
    os << "invalid grid: radii=" << n_radii << " angles=" << angles << " r_max=" << r_max;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  VarietyGrid g;
  g.angles = angles;
  const double gap = 1.0 - r_max;
  for (int i = 0; i < n_radii; ++i)
    g.radii.push_back(1.0 - std::pow(gap, static_cast<double>(i + 1) / n_radii));
  return g;
}

VarietyGrid VarietyGrid::refined() const {
  return geometric(static_cast<int>(2 * radii.size()), 2 * angles, max_radius());
}

double VarietyGrid::max_radius() const {
  return radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
}

cplx VarietyGrid::point(Index radius_index, Index angle_index) const {
  return std::polar(radii[static_cast<std::size_t>(radius_index)],
                    2.0 * std::numbers::pi * static_cast<double>(angle_index) / angles);
}

void VarietyGrid::validate() const {
  if (radii.empty() || angles < 1) throw Error(ErrorCode::InvalidArgument, "grid is empty");
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) {
      std::ostringstream os;
      os << "grid radius " << r << " outside (0,1)";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
}

namespace {

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double abs_det(const CMat& m) {
  if (m.size() == 0) return 1.0;
  return std::abs(Eigen::PartialPivLU<CMat>(m).determinant());
}

std::vector<cplx> sorted_eigenvalues(const CMat& m) {
  const CVec ev = eigenvalues(m);
  std::vector<cplx> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

// Runs body(i) for i in [0, n) on a few threads; each index writes only its own slot.
template <typename Body>
void parallel_for(std::size_t n, Body body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(n, hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += workers) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<VarietyPoint> fiber_points(const BclSymbols& sym, cplx w, Index ri, Index ai,
                                       const Tolerances& tol) {
  const Index e = sym.phi.dim();
  const CMat phi = sym.phi(w);
  const CMat psi = sym.psi(w);
  auto spectrum = [&](const CMat& m) {
    try {
      return sorted_eigenvalues(m);
    } catch (const Error& err) {
      std::ostringstream os;
      os << err.what() << " at grid point (" << ri << ", " << ai << "), w = " << w;
      throw Error(ErrorCode::EigenFailure, os.str());
    }
  };

  // z2 = w / z1 carries an absolute error of about eps |w| / |z1|^2, so
  // eigenvalues of Φ(w) that small are replaced by the matching (largest)
  // eigenvalues of Ψ(w).
  const double small_sq = 1e-8 * std::abs(w);
  std::vector<std::pair<cplx, cplx>> pairs;
  std::size_t small = 0;
  for (cplx z1 : spectrum(phi)) {
    if (std::norm(z1) > small_sq && std::abs(z1) > tol.rank_tol)
      pairs.emplace_back(z1, w / z1);
    else
      ++small;
  }
  if (small > 0) {
    std::vector<cplx> z2s = spectrum(psi);
    std::sort(z2s.begin(), z2s.end(), [](cplx a, cplx b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
      return lex_less(a, b);
    });
    for (std::size_t k = 0; k < small && k < z2s.size(); ++k)
      pairs.emplace_back(w / z2s[k], z2s[k]);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return lex_less(a.first, b.first);
    return lex_less(a.second, b.second);
  });

  std::vector<VarietyPoint> out;
  const CMat id = identity(e);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    VarietyPoint p;
    p.w = w;
    p.z1 = pairs[k].first;
    p.z2 = pairs[k].second;
    p.res_phi = abs_det(phi - p.z1 * id);
    p.res_psi = abs_det(psi - p.z2 * id);
    p.accepted = p.res_phi <= tol.residual_tol && p.res_psi <= tol.residual_tol &&
                 std::abs(p.z1 * p.z2 - w) <= tol.residual_tol;
    p.radius_index = ri;
    p.angle_index = ai;
    p.eigen_index = static_cast<Index>(k);
    out.push_back(p);
  }
  return out;
}

template <typename Fiber>
VarietySample sample_grid(const VarietyGrid& grid, Fiber fiber) {
  grid.validate();
  const std::size_t nr = grid.radii.size();
  const std::size_t na = static_cast<std::size_t>(grid.angles);
  std::vector<std::vector<VarietyPoint>> slots(nr * na);
  parallel_for(nr * na, [&](std::size_t idx) {
    const Index ri = static_cast<Index>(idx / na);
    const Index ai = static_cast<Index>(idx % na);
    slots[idx] = fiber(ri, ai);
  });
  VarietySample s;
  s.grid = grid;
  for (auto& slot : slots) s.points.insert(s.points.end(), slot.begin(), slot.end());
  return s;
}

}  // namespace

VarietySample sample_variety(const BCLTriple& triple, const VarietyGrid& grid,
                             const Tolerances& tol) {
  const BclSymbols sym = bcl_symbols(triple);
  VarietySample s = sample_grid(grid, [&](Index ri, Index ai) {
    return fiber_points(sym, grid.point(ri, ai), ri, ai, tol);
  });
  s.distinguished = distinguished_check(s, grid.max_radius(), tol);
  return s;
}

double transfer_residual(const BlockDecomposition& blocks, cplx z1, cplx z2,
                         const Tolerances& tol) {
  const CMat tau = transfer_function(blocks, z1, tol).tau;
  if (tau.size() == 0) return 1.0;
  const CVec ev = eigenvalues(tau);
  double scale = 1.0;
  for (Index i = 0; i < ev.size(); ++i) scale *= 1.0 + std::abs(ev(i));
  return abs_det(tau - z2 * identity(tau.rows())) / scale;
}

VarietySample sample_transfer_variety(const BCLTriple& triple, const VarietyGrid& grid,
                                      const Tolerances& tol) {
  const BlockDecomposition blocks = block_decomposition(triple);
  const BclSymbols sym = bcl_symbols(triple);
  return sample_grid(grid, [&](Index ri, Index ai) {
    const cplx z1 = grid.point(ri, ai);
    const CMat tau = transfer_function(blocks, z1, tol).tau;
    const std::vector<cplx> z2s = sorted_eigenvalues(tau);
    double scale = 1.0;
    for (cplx l : z2s) scale *= 1.0 + std::abs(l);
    const CMat id = identity(triple.e_dim());
    std::vector<VarietyPoint> out;
    for (std::size_t k = 0; k < z2s.size(); ++k) {
      VarietyPoint p;
      p.z1 = z1;
      p.z2 = z2s[k];
      p.w = z1 * p.z2;
      p.res_tau = abs_det(tau - p.z2 * identity(tau.rows())) / scale;
      p.res_phi = abs_det(sym.phi(p.w) - p.z1 * id);
      p.res_psi = abs_det(sym.psi(p.w) - p.z2 * id);
      p.accepted = *p.res_tau <= tol.residual_tol;
      p.radius_index = ri;
      p.angle_index = ai;
      p.eigen_index = static_cast<Index>(k);
      out.push_back(p);
    }
    return out;
  });
}

namespace {

bool interior_z1(const VarietyPoint& p, const Tolerances& tol) {
  return std::abs(p.z1) < 1.0 - tol.rank_tol;
}

}  // namespace

CrossValidation cross_validate_varieties(const VarietySample& s, const BlockDecomposition& blocks,
                                         const Tolerances& tol, double threshold) {
  std::vector<double> res(s.points.size(), -1.0);
  parallel_for(s.points.size(), [&](std::size_t i) {
    const VarietyPoint& p = s.points[i];
    if (interior_z1(p, tol)) res[i] = transfer_residual(blocks, p.z1, p.z2, tol);
  });
  CrossValidation cv;
  cv.threshold = threshold;
  double sum = 0.0;
  for (double r : res) {
    if (r < 0.0) continue;
    ++cv.count;
    sum += r;
    cv.max_residual = std::max(cv.max_residual, r);
  }
  cv.mean_residual = cv.count ? sum / static_cast<double>(cv.count) : 0.0;
  cv.flagged = !(cv.max_residual <= threshold);
  return cv;
}

void attach_transfer_residuals(VarietySample& s, const BlockDecomposition& blocks,
                               const Tolerances& tol) {
  parallel_for(s.points.size(), [&](std::size_t i) {
    VarietyPoint& p = s.points[i];
    if (interior_z1(p, tol)) p.res_tau = transfer_residual(blocks, p.z1, p.z2, tol);
  });
}

DistinguishedReport distinguished_report(const VarietySample& s, double boundary_radius,
                                         const Tolerances& tol) {
  constexpr double exit_tol = 1e-6;
  DistinguishedReport rep;
  rep.interior = true;
  rep.exits = true;
  rep.fiber_min.assign(s.grid.radii.size(), std::numeric_limits<double>::infinity());
  for (const VarietyPoint& p : s.points) {
    const double aw = std::abs(p.w);
    if (aw > boundary_radius + 1e-15) continue;
    const double hi = std::max(std::abs(p.z1), std::abs(p.z2));
    const double lo = std::min(std::abs(p.z1), std::abs(p.z2));
    rep.max_modulus = std::max(rep.max_modulus, hi);
    if (!(hi < 1.0 - tol.purity_margin)) rep.interior = false;
    if (!(lo >= aw - exit_tol)) rep.exits = false;
    auto& fm = rep.fiber_min[static_cast<std::size_t>(p.radius_index)];
    fm = std::min(fm, lo);
  }
  return rep;
}

bool distinguished_check(const VarietySample& s, double boundary_radius, const Tolerances& tol) {
  return distinguished_report(s, boundary_radius, tol).verdict();
}

BivariatePoly::BivariatePoly(std::vector<std::vector<cplx>> c) : coeffs(std::move(c)) { trim(); }

void BivariatePoly::trim() {
  std::size_t width = 0;
  for (const auto& row : coeffs) width = std::max(width, row.size());
  for (auto& row : coeffs) row.resize(width, cplx(0.0));
  while (!coeffs.empty() &&
         std::all_of(coeffs.back().begin(), coeffs.back().end(), [](cplx c) { return c == 0.0; }))
    coeffs.pop_back();
  while (width > 0 && std::all_of(coeffs.begin(), coeffs.end(),
                                  [&](const auto& row) { return row[width - 1] == 0.0; }))
    --width;
  for (auto& row : coeffs) row.resize(width);
  if (width == 0) coeffs.clear();
}

int BivariatePoly::deg1() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

int BivariatePoly::deg2() const noexcept {
  return coeffs.empty() ? -1 : static_cast<int>(coeffs.front().size()) - 1;
}

double BivariatePoly::lipschitz_bound() const {
  double l = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = 0; j < coeffs[i].size(); ++j)
      l += std::abs(coeffs[i][j]) * static_cast<double>(i + j);
  return l;
}

cplx eval_poly(const BivariatePoly& p, cplx z1, cplx z2) {
  cplx acc = 0.0;
  for (auto row = p.coeffs.rbegin(); row != p.coeffs.rend(); ++row) {
    cplx inner = 0.0;
    for (auto c = row->rbegin(); c != row->rend(); ++c) inner = inner * z2 + *c;
    acc = acc * z1 + inner;
  }
  return acc;
}

CMat eval_poly_matrix(const BivariatePoly& p, const CommutingPair& pair) {
  const Index n = pair.dim();
  std::vector<CMat> t2p{identity(n)};
  for (int j = 1; j <= p.deg2(); ++j) t2p.push_back(t2p.back() * pair.t2.t);
  CMat acc = CMat::Zero(n, n);
  for (auto row = p.coeffs.rbegin(); row != p.coeffs.rend(); ++row) {
    CMat inner = CMat::Zero(n, n);
    for (std::size_t j = 0; j < row->size(); ++j) inner += (*row)[j] * t2p[j];
    acc = pair.t1.t * acc + inner;
  }
  return acc;
}

BivariatePoly random_poly(std::mt19937_64& rng, int max_degree) {
  if (max_degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be nonnegative");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<cplx>> c(static_cast<std::size_t>(max_degree) + 1,
                                   std::vector<cplx>(static_cast<std::size_t>(max_degree) + 1));
  for (int i = 0; i <= max_degree; ++i)
    for (int j = 0; i + j <= max_degree; ++j) {
      const double r = std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      c[i][j] = std::polar(r, theta);
    }
  return BivariatePoly(std::move(c));
}

std::string_view to_string(VnVerdict v) noexcept {
  switch (v) {
    case VnVerdict::Pass: return "PASS";
    case VnVerdict::Inconclusive: return "INCONCLUSIVE";
    case VnVerdict::Fail: return "FAIL";
  }
  return "UNKNOWN";
}

VnReport von_neumann_check(const CommutingPair& pair, const VarietySample& sample,
                           const BivariatePoly& p, double slack) {
  VnReport rep;
  rep.slack = slack;
  rep.radii = static_cast<int>(sample.grid.radii.size());
  rep.angles = sample.grid.angles;
  rep.max_radius = sample.grid.max_radius();
  rep.lhs = operator_norm(eval_poly_matrix(p, pair));
  for (const VarietyPoint& pt : sample.points) {
    if (!pt.accepted) continue;
    ++rep.points;
    rep.rhs = std::max(rep.rhs, std::abs(eval_poly(p, pt.z1, pt.z2)));
  }
  if (p.coeffs.size() == 1 && p.coeffs[0].size() == 1) rep.rhs = std::abs(p.coeffs[0][0]);
  rep.grid_bound =
      p.lipschitz_bound() * ((1.0 - rep.max_radius) + std::numbers::pi / std::max(1, rep.angles));
  if (rep.lhs <= rep.rhs + slack)
    rep.verdict = VnVerdict::Pass;
  else if (rep.lhs <= rep.rhs + slack + rep.grid_bound)
    rep.verdict = VnVerdict::Inconclusive;
  else
    rep.verdict = VnVerdict::Fail;
  return rep;
}

VnReport von_neumann_check(const CommutingPair& pair, const BCLTriple& triple,
                           const BivariatePoly& p, const VarietyGrid& grid, double slack,
                           const Tolerances& tol) {
  return von_neumann_check(pair, sample_variety(triple, grid, tol), p, slack);
}

VnSuiteReport von_neumann_suite(const CommutingPair& pair, const BCLTriple& triple,
                                const std::vector<BivariatePoly>& polys, const VarietyGrid& grid,
                                double slack, bool refine, const Tolerances& tol) {
  VnSuiteReport suite;
  const VarietySample sample = sample_variety(triple, grid, tol);
  std::vector<std::size_t> retry;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    suite.reports.push_back(von_neumann_check(pair, sample, polys[i], slack));
    if (suite.reports.back().verdict == VnVerdict::Inconclusive) retry.push_back(i);
  }
  suite.inconclusive_initial = retry.size();
  if (refine && !retry.empty()) {
    suite.refined = true;
    const VarietySample fine = sample_variety(triple, grid.refined(), tol);
    for (std::size_t i : retry) suite.reports[i] = von_neumann_check(pair, fine, polys[i], slack);
  }
  for (const VnReport& r : suite.reports) {
    switch (r.verdict) {
      case VnVerdict::Pass: ++suite.pass; break;
      case VnVerdict::Inconclusive: ++suite.inconclusive; break;
      case VnVerdict::Fail: ++suite.fail; break;
    }
  }
  return suite;
}

}  // namespace pdil
