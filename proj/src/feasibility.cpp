#include "ttr/feasibility.hpp"

#include <cmath>

namespace ttr {

RVector realify(const CMatrix& m) {
  const Index n = m.size();
  RVector out(2 * n);
  for (Index i = 0; i < n; ++i) {
    out(i) = m.data()[i].real();
    out(n + i) = m.data()[i].imag();
  }
  return out;
}

namespace {

CMatrix assemble(const std::vector<CMatrix>& basis, const RVector& c) {
  CMatrix x = CMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t l = 0; l < basis.size(); ++l) x += c(static_cast<Index>(l)) * basis[l];
  return x;
}

double min_eig_of(const CMatrix& x, CVector* vec) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()));
  if (vec) *vec = es.eigenvectors().col(0);
  return es.eigenvalues()(0);
}

}  // namespace

AffinePsdSolution solve_affine_psd(const AffinePsdProblem& p, int max_iter) {
  const Index nh = p.dim * p.dim;
  const Index nv = nh + p.extra;
  if (p.a.cols() != nv || p.a.rows() != p.b.size())
    throw DomainError("affine problem has inconsistent shapes");
  const auto basis = hermitian_basis(p.dim);

  RMatrix a(p.a.rows() + 1, nv);
  RVector b(p.b.size() + 1);
  a.topRows(p.a.rows()) = p.a;
  b.head(p.b.size()) = p.b;
  a.row(p.a.rows()).setZero();
  for (Index l = 0; l < nh; ++l) a(p.a.rows(), l) = basis[static_cast<std::size_t>(l)].trace().real();
  b(p.b.size()) = 1.0;

  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  double top = sv.size() ? sv(0) : 0.0;
  double thr = 1e-10 * std::max(top, 1.0);
  svd.setThreshold(thr / std::max(top, 1e-300));
  RVector c0 = svd.solve(b);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;

  AffinePsdSolution out;
  out.residual = (a * c0 - b).norm();
  out.nullity = nv - rank;
  RMatrix null_dirs = svd.matrixV().rightCols(out.nullity);

  std::vector<CMatrix> dirs;
  for (Index i = 0; i < out.nullity; ++i) {
    RVector v = null_dirs.col(i);
    dirs.push_back(assemble(basis, v.head(nh)));
  }

  RVector t = RVector::Zero(out.nullity);
  auto point = [&](const RVector& tt) {
    RVector c = c0;
    if (out.nullity) c += null_dirs * tt;
    return c;
  };

  RVector best_c = c0;
  CVector v;
  double best = min_eig_of(assemble(basis, c0.head(nh)), &v);
  if (out.nullity > 0) {
    for (int k = 1; k <= max_iter; ++k) {
      RVector c = point(t);
      double lo = min_eig_of(assemble(basis, c.head(nh)), &v);
      out.iterations = k;
      if (lo > best) {
        best = lo;
        best_c = c;
      }
      RVector g(out.nullity);
      for (Index i = 0; i < out.nullity; ++i)
        g(i) = (v.adjoint() * dirs[static_cast<std::size_t>(i)] * v)(0, 0).real();
      double gn = g.norm();
      if (gn < 1e-14) break;
      t += (0.5 / k) * g / gn;
    }
  }
  out.x = HermMatrix::symmetrize(assemble(basis, best_c.head(nh))).mat();
  out.extra = best_c.tail(p.extra);
  out.min_eig = best;
  return out;
}

}  // namespace ttr
