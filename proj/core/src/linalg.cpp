#include "pdil/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdil {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::CodimensionMismatch: return "CodimensionMismatch";
    case ErrorCode::NotIsometric: return "NotIsometric";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::InvalidPowers: return "InvalidPowers";
    case ErrorCode::ExtensionFailure: return "ExtensionFailure";
    case ErrorCode::NearSingularResolvent: return "NearSingularResolvent";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::TripleMismatch: return "TripleMismatch";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(rank_tol) || !in_unit(residual_tol) || !in_unit(purity_margin)) {
    std::ostringstream os;
    os << "tolerances must lie in (0,1): rank_tol=" << rank_tol
       << " residual_tol=" << residual_tol << " purity_margin=" << purity_margin;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

CMat identity(Index n) { return CMat::Identity(n, n); }

namespace {

void require_square(const CMat& m, const char* who) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << who << " needs a square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

Eigen::JacobiSVD<CMat> full_svd(const CMat& m) {
  return Eigen::JacobiSVD<CMat>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Index count_above(const Eigen::VectorXd& sv, double cutoff) {
  Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return r;
}

}  // namespace

void normalize_column_phases(CMat& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0) {
      const cplx phase = m(best, j) / best_abs;
      m.col(j) *= std::conj(phase);
      m(best, j) = cplx(std::abs(m(best, j)), 0.0);
    }
  }
}

CMat psd_sqrt(const CMat& m, double negativity_floor, double clip_cutoff,
              double hermitian_bound) {
  require_square(m, "psd_sqrt");
  if (m.size() == 0) return m;
  const double asym = operator_norm(m - m.adjoint());
  if (asym > hermitian_bound) {
    std::ostringstream os;
    os << "symmetry residual " << asym << " exceeds " << hermitian_bound;
    throw Error(ErrorCode::NotHermitian, os.str());
  }
  const CMat sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver did not converge");
  }
  Eigen::VectorXd ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -negativity_floor) {
      std::ostringstream os;
      os << "eigenvalue " << ev(i) << " below -" << negativity_floor;
      throw Error(ErrorCode::NotPSD, os.str());
    }
    ev(i) = ev(i) < clip_cutoff ? 0.0 : std::sqrt(ev(i));
  }
  const CMat& v = es.eigenvectors();
  CMat r = v * ev.cast<cplx>().asDiagonal() * v.adjoint();
  return 0.5 * (r + r.adjoint());
}

CMat hermitian_sqrt(const CMat& m, const Tolerances& tol) {
  require_square(m, "hermitian_sqrt");
  const double scale = operator_norm(m);
  return psd_sqrt(m, tol.rank_tol * std::max(1.0, scale), tol.rank_tol * scale,
                  tol.residual_tol * std::max(1.0, scale));
}

SubspaceBasis range_basis_abs(const CMat& m, double cutoff) {
  SubspaceBasis out;
  out.ambient_dim = m.rows();
  if (m.rows() == 0 || m.cols() == 0) {
    out.basis = CMat(m.rows(), 0);
    return out;
  }
  const auto svd = full_svd(m);
  const Index r = count_above(svd.singularValues(), cutoff);
  out.basis = svd.matrixU().leftCols(r);
  normalize_column_phases(out.basis);
  return out;
}

SubspaceBasis kernel_basis_abs(const CMat& m, double cutoff) {
  SubspaceBasis out;
  out.ambient_dim = m.cols();
  if (m.cols() == 0) {
    out.basis = CMat(0, 0);
    return out;
  }
  if (m.rows() == 0) {
    out.basis = identity(m.cols());
    return out;
  }
  const auto svd = full_svd(m);
  const Index r = count_above(svd.singularValues(), cutoff);
  out.basis = svd.matrixV().rightCols(m.cols() - r);
  normalize_column_phases(out.basis);
  return out;
}

namespace {

double relative_cutoff(const CMat& m, const Tolerances& tol) {
  return tol.rank_tol * operator_norm(m);
}

}  // namespace

SubspaceBasis range_basis(const CMat& m, const Tolerances& tol) {
  return range_basis_abs(m, relative_cutoff(m, tol));
}

SubspaceBasis kernel_basis(const CMat& m, const Tolerances& tol) {
  return kernel_basis_abs(m, relative_cutoff(m, tol));
}

CMat extend_isometry_to_unitary(const SubspaceBasis& domain, const SubspaceBasis& codomain,
                                const CMat& action, Index ambient_dim, const Tolerances& tol) {
  if (domain.ambient_dim != ambient_dim || codomain.ambient_dim != ambient_dim ||
      domain.basis.rows() != ambient_dim || codomain.basis.rows() != ambient_dim) {
    throw Error(ErrorCode::InvalidArgument, "basis ambient dimension mismatch");
  }
  if (action.rows() != codomain.dim() || action.cols() != domain.dim()) {
    std::ostringstream os;
    os << "action is " << action.rows() << "x" << action.cols() << ", expected "
       << codomain.dim() << "x" << domain.dim();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (ambient_dim - domain.dim() != ambient_dim - codomain.dim()) {
    std::ostringstream os;
    os << "complement dimensions " << ambient_dim - domain.dim() << " and "
       << ambient_dim - codomain.dim() << " differ";
    throw Error(ErrorCode::CodimensionMismatch, os.str());
  }
  if (action.size() > 0) {
    const double iso = operator_norm(action.adjoint() * action - identity(action.cols()));
    if (iso > tol.residual_tol) {
      std::ostringstream os;
      os << "isometry residual " << iso << " exceeds " << tol.residual_tol;
      throw Error(ErrorCode::NotIsometric, os.str());
    }
  }

  const CMat id = identity(ambient_dim);
  // Complement projectors have singular values 0 or 1, so a fixed cutoff of
  // one half separates them robustly.
  const SubspaceBasis dom_c = range_basis_abs(id - domain.projector(), 0.5);
  const SubspaceBasis cod_c = range_basis_abs(id - codomain.projector(), 0.5);
  if (dom_c.dim() != cod_c.dim()) {
    std::ostringstream os;
    os << "numerical complement dimensions " << dom_c.dim() << " and " << cod_c.dim()
       << " differ";
    throw Error(ErrorCode::CodimensionMismatch, os.str());
  }

  CMat w = codomain.basis * action * domain.basis.adjoint() +
           cod_c.basis * dom_c.basis.adjoint();
  const double res = unitarity_residual(w);
  if (res > tol.residual_tol) {
    std::ostringstream os;
    os << "extended operator has unitarity residual " << res;
    throw Error(ErrorCode::NotIsometric, os.str());
  }
  return w;
}

CVec eigenvalues(const CMat& m) {
  require_square(m, "eigenvalues");
  if (m.size() == 0) return CVec(0);
  Eigen::ComplexEigenSolver<CMat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "complex eigensolver did not converge");
  }
  return es.eigenvalues();
}

double spectral_radius(const CMat& m) {
  const CVec ev = eigenvalues(m);
  double r = 0.0;
  for (Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev(i)));
  return r;
}

double operator_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) > 32) {
    Eigen::BDCSVD<CMat> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CMat pseudo_inverse(const CMat& m, double rel_cutoff) {
  if (m.size() == 0) return CMat(m.cols(), m.rows());
  const auto svd = full_svd(m);
  const auto& sv = svd.singularValues();
  const Index r = count_above(sv, rel_cutoff * sv(0));
  CMat inv_s = CMat::Zero(r, r);
  for (Index i = 0; i < r; ++i) inv_s(i, i) = 1.0 / sv(i);
  return svd.matrixV().leftCols(r) * inv_s * svd.matrixU().leftCols(r).adjoint();
}

double unitarity_residual(const CMat& x) {
  if (x.size() == 0) return 0.0;
  return std::max(operator_norm(x.adjoint() * x - identity(x.cols())),
                  operator_norm(x * x.adjoint() - identity(x.rows())));
}

double partial_isometry_residual(const CMat& x) {
  return operator_norm(x * x.adjoint() * x - x);
}

CMat matrix_power(const CMat& m, int k) {
  require_square(m, "matrix_power");
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix power");
  CMat result = identity(m.rows());
  CMat base = m;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

bool all_finite(const CMat& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

}  // namespace pdil
