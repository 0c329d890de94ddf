#include "oracles.hpp"

#include <cmath>
#include <random>

namespace oracle {

CMatrix brute_choi(const LinearMap& f, Index d_in, Index d_out) {
  CMatrix j = CMatrix::Zero(d_in * d_out, d_in * d_out);
  for (Index a = 0; a < d_in; ++a)
    for (Index b = 0; b < d_in; ++b) {
      CMatrix e = CMatrix::Zero(d_in, d_in);
      e(a, b) = 1.0;
      CMatrix out = f(e);
      for (Index r = 0; r < d_out; ++r)
        for (Index c = 0; c < d_out; ++c) j(a * d_out + r, b * d_out + c) = out(r, c);
    }
  return j;
}

CMatrix kraus_sum(const std::vector<CMatrix>& ks, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(ks.front().rows(), ks.front().rows());
  for (const auto& k : ks) out += k * rho * k.adjoint();
  return out;
}

CMatrix kraus_adjoint_sum(const std::vector<CMatrix>& ks, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(ks.front().cols(), ks.front().cols());
  for (const auto& k : ks) out += k.adjoint() * x * k;
  return out;
}

CMatrix trace_out_e(const CMatrix& m, Index ds, Index de) {
  CMatrix out = CMatrix::Zero(ds, ds);
  for (Index i = 0; i < ds; ++i)
    for (Index j = 0; j < ds; ++j)
      for (Index a = 0; a < de; ++a) out(i, j) += m(i * de + a, j * de + a);
  return out;
}

CMatrix trace_out_s(const CMatrix& m, Index ds, Index de) {
  CMatrix out = CMatrix::Zero(de, de);
  for (Index a = 0; a < de; ++a)
    for (Index b = 0; b < de; ++b)
      for (Index i = 0; i < ds; ++i) out(a, b) += m(i * de + a, i * de + b);
  return out;
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double herm_trace_norm(const CMatrix& h) {
  CMatrix s = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  return es.eigenvalues().cwiseAbs().sum();
}

CMatrix herm_apply(const CMatrix& h, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd w = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix herm_sqrt(const CMatrix& h) {
  return herm_apply(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

CMatrix herm_inv_sqrt(const CMatrix& h) {
  return herm_apply(h, [](double x) { return 1.0 / std::sqrt(x); });
}

CMatrix expm(const CMatrix& a) {
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm > 0.25) {
    norm /= 2;
    ++squarings;
  }
  CMatrix x = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CMatrix dilation_apply(const CMatrix& u, const CMatrix& xi, const CMatrix& rho, Index ds, Index de) {
  return trace_out_e(u * tensor(rho, xi) * u.adjoint(), ds, de);
}

CMatrix tabletop_apply(const CMatrix& u, const CMatrix& xi_prime, const CMatrix& rho, Index ds,
                       Index de) {
  return trace_out_e(u.adjoint() * tensor(rho, xi_prime) * u, ds, de);
}

CMatrix petz_apply(const CMatrix& u, const CMatrix& xi, const CMatrix& gamma, const CMatrix& rho,
                   Index ds, Index de) {
  CMatrix gp = dilation_apply(u, xi, gamma, ds, de);
  CMatrix w = herm_inv_sqrt(gp);
  CMatrix inner = w * rho * w;
  // N^dag(X) = Tr_E((1 (x) xi) U^dag (X (x) 1) U)
  CMatrix big = tensor(CMatrix::Identity(ds, ds), xi) * u.adjoint() *
                tensor(inner, CMatrix::Identity(de, de)) * u;
  CMatrix adj = trace_out_e(big, ds, de);
  CMatrix s = herm_sqrt(gamma);
  return s * adj * s;
}

double map_distance(const LinearMap& a, const LinearMap& b, Index d) {
  return 0.5 * herm_trace_norm(brute_choi(a, d, d) - brute_choi(b, d, d)) / static_cast<double>(d);
}

std::pair<double, double> loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return {slope, r * r};
}

CMatrix dissipate(const CMatrix& l, const CMatrix& rho) {
  CMatrix ll = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
}

double uniform(ttr::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RandomDilation random_qubit_pair(ttr::Rng& rng) {
  RandomDilation r;
  r.u = ttr::random_unitary(4, rng);
  r.xi = ttr::random_density_mixed(2, 0.3, rng).mat();
  r.gamma = ttr::random_density_mixed(2, 0.3, rng).mat();
  r.xi_prime = ttr::random_density_mixed(2, 0.3, rng).mat();
  return r;
}

}  // namespace oracle
