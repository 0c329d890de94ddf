#include "ttr/random.hpp"

namespace ttr {

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      double re = n(rng);
      double im = n(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

HermMatrix random_hermitian(Index d, Rng& rng) {
  CMatrix a = ginibre(d, d, rng);
  return HermMatrix::symmetrize(a);
}

CMatrix random_unitary(Index d, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(d, d, rng));
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    Complex z = r(i, i);
    if (std::abs(z) > 0) q.col(i) *= z / std::abs(z);
  }
  return q;
}

HermMatrix random_density(Index d, Rng& rng) {
  CMatrix a = ginibre(d, d, rng);
  CMatrix rho = a * a.adjoint();
  return HermMatrix::symmetrize(rho / rho.trace().real());
}

HermMatrix random_density_mixed(Index d, double w, Rng& rng) {
  return HermMatrix::symmetrize(w * maximally_mixed(d).mat() + (1.0 - w) * random_density(d, rng).mat());
}

}  // namespace ttr
