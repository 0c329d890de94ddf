#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ttr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when an inverse-type function meets an eigenvalue at or below the
// rank tolerance. Carries the offending eigenvalue.
class RankError : public DomainError {
 public:
  RankError(const std::string& what, double eigenvalue)
      : DomainError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

struct NumericPolicy {
  double rank_tol = 1e-10;      // relative to the largest eigenvalue
  double cptp_tol = 1e-9;
  double equality_tol = 1e-9;
  double degeneracy_gap = 1e-9;

  void validate() const;
};

// Hermitian matrix. Construction checks Hermiticity entrywise and stores the
// symmetrized part, so the diagonal is exactly real.
class HermMatrix {
 public:
  HermMatrix() = default;
  explicit HermMatrix(const CMatrix& m, double tol = 1e-12);

  // Symmetrizes without validation; for results Hermitian by construction.
  static HermMatrix symmetrize(const CMatrix& m);

  const CMatrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

 private:
  CMatrix m_;
};

struct EigDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // columns, unitary

  CMatrix reconstruct() const;
  // Smallest gap between consecutive eigenvalues (infinity for dim 1).
  double min_gap() const;
};

EigDecomposition herm_eig(const HermMatrix& m);

enum class ScalarFn { Sqrt, InvSqrt, Log, Inverse, Square, Exp };

HermMatrix mat_func(const HermMatrix& m, ScalarFn f, const NumericPolicy& pol = {});
HermMatrix mat_func(const HermMatrix& m, const std::function<double(double)>& f);

// e^{-iHt}
CMatrix unitary_exp(const HermMatrix& h, double t);

CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Keep { S, E };
CMatrix partial_trace(const CMatrix& m, Index dim_s, Index dim_e, Keep keep);

double trace_norm(const CMatrix& m);

// Solves sqrt(gamma) B + B sqrt(gamma) = C.
CMatrix sylvester_sqrt_solve(const HermMatrix& gamma, const CMatrix& c,
                             const NumericPolicy& pol = {});

// Small helpers used across modules.
CMatrix identity(Index d);
HermMatrix maximally_mixed(Index d);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);
double unitarity_defect(const CMatrix& u);
bool all_finite(const CMatrix& m);

// Frobenius-orthonormal Hermitian basis of d x d matrices (d^2 elements):
// diagonal units first, then symmetric and antisymmetric off-diagonal pairs.
std::vector<CMatrix> hermitian_basis(Index d);

// Throws unless m is a density matrix (PSD within tol, unit trace within tol).
void require_density(const HermMatrix& m, const std::string& name, double tol = 1e-10);

}  // namespace ttr
