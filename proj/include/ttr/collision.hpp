#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttr/channel.hpp"

namespace ttr {

// Collision model with total Hamiltonian g (H_S + H_E + H_I), ancilla xi and
// collision rate Gamma.
struct CollisionSpec {
  HermMatrix h_s;
  HermMatrix h_e;
  HermMatrix h_i;
  HermMatrix xi;
  double g = 1.0;
  double gamma_rate = 0.0;

  Index dim_s() const { return h_s.dim(); }
  Index dim_e() const { return h_e.dim(); }
  CMatrix h_tot() const;
  void validate() const;
  // Non-fatal modelling warnings (currently: Gamma > g^2).
  std::vector<std::string> warnings() const;
};

struct Jump {
  double weight = 0.0;
  CMatrix op;
};

class LindbladGenerator {
 public:
  LindbladGenerator(HermMatrix hamiltonian, std::vector<Jump> jumps);

  const HermMatrix& hamiltonian() const { return hamiltonian_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  // d^2 x d^2 column-stacking matrix.
  const CMatrix& superop() const { return superop_; }
  Index dim() const { return hamiltonian_.dim(); }
  CMatrix apply(const CMatrix& rho) const;
  // Norm of vec(1)^dag S, zero for trace-annihilating generators.
  double trace_defect() const;

 private:
  HermMatrix hamiltonian_;
  std::vector<Jump> jumps_;
  CMatrix superop_;
};

// Column-stacking helpers: vec(A X B) = (B^T (x) A) vec(X).
CMatrix spre(const CMatrix& a);
CMatrix spost(const CMatrix& b);
CMatrix dissipator_superop(const CMatrix& l);
CMatrix vec(const CMatrix& m);
CMatrix unvec(const CMatrix& v, Index d);

// Exact collision Tr_E(e^{-i g H dt} (rho (x) xi) e^{i g H dt}).
CMatrix collision_step(const CollisionSpec& spec, const CMatrix& rho, double dt);
// rho + g dt H(rho) + (g dt)^2 sum_k p_k D[L_jk] rho.
CMatrix collision_step_expanded(const CollisionSpec& spec, const CMatrix& rho, double dt);

// Tr_E((1 (x) state) H_I).
HermMatrix lamb_shift(const HermMatrix& h_i, const HermMatrix& state);

// L_jk = <f_j| H_tot |e_k>, jump weights Gamma p_k. out_basis defaults to eig(xi).
LindbladGenerator forward_generator(const CollisionSpec& spec,
                                    const std::optional<CMatrix>& out_basis = std::nullopt);
// Hamiltonian -g (H_S + H_Ls(xi')), jumps L_jk^dag built on eig(xi'), weights Gamma p'_j.
LindbladGenerator reverse_generator(const CollisionSpec& spec, const HermMatrix& xi_prime);

// sum_w w (L^dag L + g^{-1/2} L g L^dag g^{-1/2})
CMatrix m_matrix(const HermMatrix& gamma, const std::vector<Jump>& jumps,
                 const NumericPolicy& pol = {});
HermMatrix correction_hamiltonian(const HermMatrix& gamma, const std::vector<Jump>& jumps,
                                  const NumericPolicy& pol = {});
// Hamiltonian -g (H_S + H_Ls(xi)) + H_C, jumps g^{1/2} L^dag g^{-1/2} with weights Gamma p_k.
LindbladGenerator petz_generator(const CollisionSpec& spec, const HermMatrix& gamma,
                                 const std::optional<CMatrix>& out_basis = std::nullopt,
                                 const NumericPolicy& pol = {});

HermMatrix lindblad_evolve(const LindbladGenerator& gen, const CMatrix& rho, double dt,
                           double* symmetrization_defect = nullptr);
QuantumChannel generator_channel(const LindbladGenerator& gen, double dt,
                                 const NumericPolicy& pol = {});

double lemma1_gap(const CollisionSpec& spec, const HermMatrix& gamma, double dt,
                  const NumericPolicy& pol = {});
// Matrix whose vanishing makes the Petz map of e^{dt L} agree with e^{dt L_P}
// to first order, in the eigenbasis of gamma.
CMatrix petz_generator_b_matrix(const CollisionSpec& spec, const HermMatrix& gamma,
                                const NumericPolicy& pol = {});
// Largest defect of g^{1/2} L^dag g^{-1/2} = c L^dag over the forward jumps.
double detailed_balance_defect(const CollisionSpec& spec, const HermMatrix& gamma,
                               const NumericPolicy& pol = {});

struct GeneratorMatchResidual {
  double hamiltonian = 0.0;   // min over alpha
  double dissipator = 0.0;
  double alpha = 0.0;
};
GeneratorMatchResidual theorem4_check(const CollisionSpec& spec, const HermMatrix& gamma,
                                      const HermMatrix& xi_prime, const NumericPolicy& pol = {});

struct StepSolution {
  HermMatrix xi_prime;
  double alpha = 0.0;
  double residual = 0.0;
  double min_eig = 0.0;
};
// Least-squares ancilla matching both generator equations at the given prior.
StepSolution solve_step_xi_prime(const CollisionSpec& spec, const HermMatrix& gamma,
                                 const NumericPolicy& pol = {});

// Maps (step index from 0, current prior, dt) to the reverse ancilla.
using XiPrimePolicy = std::function<HermMatrix(std::size_t, const HermMatrix&, double)>;
XiPrimePolicy constant_policy(HermMatrix xi_prime);
XiPrimePolicy solve_policy(const CollisionSpec& spec, const NumericPolicy& pol = {});

enum class DtDistribution { Fixed, Exponential };
// N step lengths with mean T/N; exponential draws are deterministic in seed.
std::vector<double> sample_dts(double total_time, std::size_t steps, DtDistribution dist,
                               std::uint64_t seed);

class TrajectoryRankError : public RankError {
 public:
  TrajectoryRankError(const std::string& what, double eigenvalue, std::size_t step)
      : RankError(what, eigenvalue), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct SequentialRun {
  double total_time = 0.0;
  std::size_t steps = 0;
  std::vector<double> dts;
  std::vector<HermMatrix> prior_trajectory;  // gamma_0 ... gamma_N
  std::vector<HermMatrix> xi_primes;
  std::vector<double> per_step_gaps;
  std::vector<double> cumulative_gaps;
  std::vector<double> min_eig_prior;
  double total_gap = 0.0;
};

SequentialRun sequential_reverse(const CollisionSpec& spec, const HermMatrix& gamma0,
                                 const XiPrimePolicy& policy, double total_time,
                                 std::size_t steps, const NumericPolicy& pol = {});
SequentialRun sequential_reverse(const CollisionSpec& spec, const HermMatrix& gamma0,
                                 const XiPrimePolicy& policy, const std::vector<double>& dts,
                                 const NumericPolicy& pol = {});

}  // namespace ttr
