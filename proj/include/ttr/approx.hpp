#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ttr/petz.hpp"

namespace ttr {

class ModeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class FitError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Family of dilations U(dt) = exp(-i g H_tot dt) with ancilla xi.
struct HamiltonianDilation {
  Index dim_s = 0;
  Index dim_e = 0;
  HermMatrix h_tot;
  HermMatrix xi;
  double g = 1.0;

  void validate() const;
  CMatrix unitary(double dt) const;
  Dilation dilation(double dt) const;
  // g * H_tot, the generator the expansions are taken in.
  CMatrix scaled() const { return g * h_tot.mat(); }
};

// Tr_E(H_tot (1 (x) state)), unscaled by g.
HermMatrix effective_hamiltonian(const HamiltonianDilation& hd, const HermMatrix& state);

// Solves sqrt(gamma) A + A sqrt(gamma) = -i[H, gamma].
CMatrix a_operator(const HermMatrix& gamma, const HermMatrix& h, const NumericPolicy& pol = {});

struct FirstOrderResidual {
  double line1 = 0.0;
  double line2 = 0.0;
  double max() const { return std::max(line1, line2); }
};

// Defects of the two first-order matching equations. The coupling of A is
// taken with the sign that makes both left-hand sides equal the Petz map's
// first-order generator for any full-rank prior.
FirstOrderResidual first_order_residual(const HamiltonianDilation& hd, const HermMatrix& gamma,
                                        const HermMatrix& xi_prime, const NumericPolicy& pol = {});

// Solves sqrt(gamma) B + B sqrt(gamma) = C with
// C = A^2 + g^{1/2} A g^{-1/2} A + A g^{-1/2} A g^{1/2} - D(gamma),
// D the forward dissipator sum_k p_k D[L_jk]. C is even in A.
CMatrix b_operator(const HamiltonianDilation& hd, const HermMatrix& gamma, const CMatrix& a,
                   const NumericPolicy& pol = {});

enum class SecondOrderMode { General, SteadyCommuting, MaximallyMixed };
SecondOrderMode parse_mode(const std::string& s);
const char* to_string(SecondOrderMode m);

// Largest defect of the first- and second-order matching conditions, the
// second-order one evaluated on a complete Hermitian operator basis.
double second_order_residual(const HamiltonianDilation& hd, const HermMatrix& gamma,
                             const HermMatrix& xi_prime, SecondOrderMode mode,
                             const NumericPolicy& pol = {});

// Second-order coefficient of the Petz map of N_dt, i.e. P(dt) = id + dt P1 + dt^2 P2 + ...
CMatrix petz_second_order_term(const HamiltonianDilation& hd, const HermMatrix& gamma,
                               const CMatrix& rho, const NumericPolicy& pol = {});
// Second-order coefficient of the tabletop reverse with ancilla xi'.
CMatrix tabletop_second_order_term(const HamiltonianDilation& hd, const CMatrix& xi_prime,
                                   const CMatrix& rho);

// Ancilla meeting the matching conditions up to the given order (1 or 2) in
// the least-squares sense, with maximal smallest eigenvalue.
struct OrderWitness {
  HermMatrix xi_prime;
  double residual = 0.0;
  double min_eig = 0.0;
  bool feasible = false;
};
OrderWitness solve_order_xi_prime(const HamiltonianDilation& hd, const HermMatrix& gamma,
                                  int order, SecondOrderMode mode = SecondOrderMode::General,
                                  const NumericPolicy& pol = {});

double map_mismatch(const HamiltonianDilation& hd, const HermMatrix& gamma,
                    const HermMatrix& xi_prime, double dt, const NumericPolicy& pol = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
};

// Least-squares slope of log(value) against log(dt); points with value at or
// below `floor` are skipped. Fewer than six usable points is a FitError.
SlopeFit scaling_exponent(const std::vector<std::pair<double, double>>& points,
                          double floor = 1e-13);
// Same fit with a caller-chosen minimum number of usable points.
SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& points, double floor,
                    std::size_t min_points);

std::vector<double> log_grid(double lo, double hi, int points);

// Mismatch on a grid, evaluated concurrently, ordered as dts.
std::vector<std::pair<double, double>> mismatch_grid(const HamiltonianDilation& hd,
                                                     const HermMatrix& gamma,
                                                     const HermMatrix& xi_prime,
                                                     const std::vector<double>& dts,
                                                     const NumericPolicy& pol = {});

}  // namespace ttr
