#include "ttr/matrixkit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ttr {

void NumericPolicy::validate() const {
  if (!(rank_tol > 0 && cptp_tol > 0 && equality_tol > 0 && degeneracy_gap > 0))
    throw DomainError("numeric policy tolerances must be positive");
}

HermMatrix::HermMatrix(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DomainError("Hermitian matrix must be square");
  if (!all_finite(m)) throw DomainError("matrix has non-finite entries");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > tol * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max |M - M^dag| = " << defect << ")";
    throw DomainError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermMatrix HermMatrix::symmetrize(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("Hermitian matrix must be square");
  HermMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

CMatrix EigDecomposition::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

double EigDecomposition::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < values.size(); ++i) g = std::min(g, values(i) - values(i - 1));
  return g;
}

EigDecomposition herm_eig(const HermMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.mat());
  if (es.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  EigDecomposition out{es.eigenvalues(), es.eigenvectors()};
  // Phase convention: largest-modulus component real positive. Ties resolve to
  // the first index so the choice does not depend on rounding noise.
  for (Index c = 0; c < out.vectors.cols(); ++c) {
    auto col = out.vectors.col(c);
    double big = col.cwiseAbs().maxCoeff();
    Index pick = 0;
    for (Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) >= big * (1.0 - 1e-10)) {
        pick = r;
        break;
      }
    }
    Complex z = col(pick);
    col *= std::conj(z) / std::abs(z);
  }
  return out;
}

namespace {

double apply_scalar(ScalarFn f, double x) {
  switch (f) {
    case ScalarFn::Sqrt: return std::sqrt(std::max(x, 0.0));
    case ScalarFn::InvSqrt: return 1.0 / std::sqrt(x);
    case ScalarFn::Log: return std::log(x);
    case ScalarFn::Inverse: return 1.0 / x;
    case ScalarFn::Square: return x * x;
    case ScalarFn::Exp: return std::exp(x);
  }
  return 0.0;
}

void check_full_rank(const RVector& vals, const NumericPolicy& pol, const char* what) {
  double top = vals.size() ? vals.maxCoeff() : 0.0;
  double floor = pol.rank_tol * std::max(top, 0.0);
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals(i) <= floor) {
      std::ostringstream os;
      os << what << ": eigenvalue " << vals(i) << " at or below rank tolerance " << floor;
      throw RankError(os.str(), vals(i));
    }
  }
}

}  // namespace

HermMatrix mat_func(const HermMatrix& m, ScalarFn f, const NumericPolicy& pol) {
  EigDecomposition e = herm_eig(m);
  if (f == ScalarFn::InvSqrt || f == ScalarFn::Log || f == ScalarFn::Inverse)
    check_full_rank(e.values, pol, "singular matrix function");
  if (f == ScalarFn::Sqrt) {
    double top = std::max(e.values.maxCoeff(), 0.0);
    if (e.values.minCoeff() < -pol.rank_tol * std::max(top, 1.0))
      throw DomainError("square root of a matrix with a negative eigenvalue");
  }
  RVector fv(e.values.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = apply_scalar(f, e.values(i));
  return HermMatrix::symmetrize(e.vectors * fv.cast<Complex>().asDiagonal() *
                                e.vectors.adjoint());
}

HermMatrix mat_func(const HermMatrix& m, const std::function<double(double)>& f) {
  EigDecomposition e = herm_eig(m);
  RVector fv(e.values.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  return HermMatrix::symmetrize(e.vectors * fv.cast<Complex>().asDiagonal() *
                                e.vectors.adjoint());
}

CMatrix unitary_exp(const HermMatrix& h, double t) {
  EigDecomposition e = herm_eig(h);
  CVector ph(e.values.size());
  for (Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(Complex(0.0, -e.values(i) * t));
  return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, Index dim_s, Index dim_e, Keep keep) {
  if (m.rows() != dim_s * dim_e || m.cols() != dim_s * dim_e)
    throw DomainError("partial_trace: matrix dimension does not match dim_S * dim_E");
  if (keep == Keep::S) {
    CMatrix out = CMatrix::Zero(dim_s, dim_s);
    for (Index a = 0; a < dim_s; ++a)
      for (Index b = 0; b < dim_s; ++b)
        for (Index k = 0; k < dim_e; ++k) out(a, b) += m(a * dim_e + k, b * dim_e + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_e, dim_e);
  for (Index a = 0; a < dim_e; ++a)
    for (Index b = 0; b < dim_e; ++b)
      for (Index s = 0; s < dim_s; ++s) out(a, b) += m(s * dim_e + a, s * dim_e + b);
  return out;
}

double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CMatrix sylvester_sqrt_solve(const HermMatrix& gamma, const CMatrix& c,
                             const NumericPolicy& pol) {
  if (c.rows() != gamma.dim() || c.cols() != gamma.dim())
    throw DomainError("sylvester_sqrt_solve: dimension mismatch");
  EigDecomposition e = herm_eig(gamma);
  check_full_rank(e.values, pol, "sylvester_sqrt_solve");
  CMatrix ct = e.vectors.adjoint() * c * e.vectors;
  for (Index m = 0; m < ct.rows(); ++m)
    for (Index n = 0; n < ct.cols(); ++n)
      ct(m, n) /= std::sqrt(e.values(m)) + std::sqrt(e.values(n));
  return e.vectors * ct * e.vectors.adjoint();
}

CMatrix identity(Index d) { return CMatrix::Identity(d, d); }

HermMatrix maximally_mixed(Index d) {
  return HermMatrix::symmetrize(CMatrix::Identity(d, d) / static_cast<double>(d));
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

bool all_finite(const CMatrix& m) {
  for (Index i = 0; i < m.size(); ++i) {
    Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::vector<CMatrix> hermitian_basis(Index d) {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(d * d));
  const double r = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < d; ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    m(i, i) = 1.0;
    out.push_back(m);
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      CMatrix s = CMatrix::Zero(d, d);
      s(i, j) = r;
      s(j, i) = r;
      out.push_back(s);
      CMatrix a = CMatrix::Zero(d, d);
      a(i, j) = Complex(0, -r);
      a(j, i) = Complex(0, r);
      out.push_back(a);
    }
  }
  return out;
}

void require_density(const HermMatrix& m, const std::string& name, double tol) {
  double tr = m.mat().trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << name << " must have unit trace (got " << tr << ")";
    throw DomainError(os.str());
  }
  double lo = herm_eig(m).values.minCoeff();
  if (lo < -tol) {
    std::ostringstream os;
    os << name << " must be positive semidefinite (min eigenvalue " << lo << ")";
    throw DomainError(os.str());
  }
}

}  // namespace ttr
