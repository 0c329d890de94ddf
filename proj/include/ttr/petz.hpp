#pragma once

#include <optional>
#include <vector>

#include "ttr/channel.hpp"

namespace ttr {

struct TTRInstance {
  Dilation dilation;
  HermMatrix gamma;
  std::optional<HermMatrix> xi_prime;
};

// Checks that gamma is a full-rank density matrix and that its image under
// the channel is full rank.
void validate_instance(const TTRInstance& inst, const NumericPolicy& pol = {});

// Petz recovery map of ch for the prior gamma: sqrt(gamma) N^dag(g'^{-1/2} . g'^{-1/2}) sqrt(gamma)
// with g' = N(gamma).
QuantumChannel petz_map(const QuantumChannel& ch, const HermMatrix& gamma,
                        const NumericPolicy& pol = {});

// rho -> Tr_E(U^dag (rho (x) xi') U).
QuantumChannel tabletop_reverse(const Dilation& d, const HermMatrix& xi_prime,
                                const NumericPolicy& pol = {});

// Phi(m, j, n, k) = <l'_m|<e'_j| U |l_n>|e_k> in the eigenbases of N(gamma),
// xi', gamma and xi.
struct TransitionMatrix {
  Index dim_s = 0;
  Index dim_e = 0;
  std::vector<Complex> entries;
  EigDecomposition gamma_out;
  EigDecomposition xi_prime;
  EigDecomposition gamma;
  EigDecomposition xi;

  Complex operator()(Index m, Index j, Index n, Index k) const {
    return entries[static_cast<std::size_t>(((m * dim_e + j) * dim_s + n) * dim_e + k)];
  }
  // max over (n,k) of |sum_{mj} |Phi|^2 - 1|
  double column_defect() const;
};

TransitionMatrix transition_matrix(const TTRInstance& inst, const NumericPolicy& pol = {});

// Largest modulus of the iff-criterion left-hand side over (m1, m2, n1, n2).
double exact_ttr_residual(const TTRInstance& inst, const NumericPolicy& pol = {});

// Normalized Choi trace distance between the Petz map and the tabletop reverse.
double choi_gap(const TTRInstance& inst, const NumericPolicy& pol = {});

// Max over (n, m) of |r_n Tr(N(P_n) P'_m) - r'_m Tr(R(P'_m) P_n)|, R the tabletop reverse.
double bayes_residual(const TTRInstance& inst, const NumericPolicy& pol = {});

// True when any of the four spectra has a gap below the degeneracy threshold.
bool degenerate_spectra(const TTRInstance& inst, const NumericPolicy& pol = {});

enum class Verdict { Feasible, Infeasible, Undetermined };
const char* to_string(Verdict v);

struct ExactTTRReport {
  std::optional<double> theorem1_residual;
  double choi_gap = 0.0;
  Verdict feasible = Verdict::Undetermined;
  std::optional<HermMatrix> witness_xi_prime;
  bool degenerate_spectra_flag = false;
  double ls_residual = 0.0;
  double best_min_eig = 0.0;
  Index nullity = 0;
  int iterations = 0;
};

// Searches for an ancilla xi' whose tabletop reverse equals the Petz map.
ExactTTRReport feasible_xi_prime(const Dilation& d, const HermMatrix& gamma,
                                 const NumericPolicy& pol = {});

struct ProductPreservation {
  bool preserved = false;
  double defect = 0.0;
  HermMatrix gamma_out;
  HermMatrix xi_out;
};

ProductPreservation product_preservation_check(const Dilation& d, const HermMatrix& gamma,
                                               const NumericPolicy& pol = {});

}  // namespace ttr
