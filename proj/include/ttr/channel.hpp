#pragma once

#include <optional>
#include <vector>

#include "ttr/matrixkit.hpp"

namespace ttr {

// Unitary U on S (x) E together with the ancilla state xi. Defines the channel
// rho -> Tr_E(U (rho (x) xi) U^dag).
class Dilation {
 public:
  Dilation(Index dim_s, Index dim_e, CMatrix u, HermMatrix xi);

  Index dim_s() const { return dim_s_; }
  Index dim_e() const { return dim_e_; }
  const CMatrix& u() const { return u_; }
  const HermMatrix& xi() const { return xi_; }

 private:
  Index dim_s_;
  Index dim_e_;
  CMatrix u_;
  HermMatrix xi_;
};

class QuantumChannel {
 public:
  // No CPTP enforcement here; use is_cptp to validate hand-built sets.
  static QuantumChannel from_kraus(std::vector<CMatrix> kraus);
  // Kraus operators recovered from the eigendecomposition of the Choi matrix.
  static QuantumChannel from_choi(const HermMatrix& choi, Index dim_in, Index dim_out,
                                  const NumericPolicy& pol = {});
  // Column-stacking superoperator S with vec(N(X)) = S vec(X).
  static QuantumChannel from_superop(const CMatrix& s, Index dim,
                                     const NumericPolicy& pol = {});

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }
  const HermMatrix& choi() const { return choi_; }
  CMatrix superop() const;

 private:
  QuantumChannel() = default;
  Index dim_in_ = 0;
  Index dim_out_ = 0;
  std::vector<CMatrix> kraus_;
  HermMatrix choi_;
};

struct CptpReport {
  bool ok = false;
  double tp_residual = 0.0;      // Frobenius norm of sum K^dag K - 1
  double tp_max_entry = 0.0;     // largest entry modulus of the same defect
  double min_choi_eig = 0.0;
};

// Kraus operators sqrt(p_k) <f_j| U |e_k>, with |e_k> from herm_eig(xi) and
// |f_j> the columns of out_basis (computational basis when absent).
QuantumChannel channel_from_dilation(const Dilation& d,
                                     const std::optional<CMatrix>& out_basis = std::nullopt,
                                     const NumericPolicy& pol = {});

CMatrix apply(const QuantumChannel& ch, const CMatrix& rho);
CMatrix adjoint_apply(const QuantumChannel& ch, const CMatrix& x);
const HermMatrix& choi(const QuantumChannel& ch);
CptpReport is_cptp(const QuantumChannel& ch, const NumericPolicy& pol = {});
double channel_distance(const QuantumChannel& a, const QuantumChannel& b);

// a after b.
QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b,
                       const NumericPolicy& pol = {});

// Choi matrix of rho -> Tr_E(U (rho (x) ancilla) U^dag) for an arbitrary
// Hermitian ancilla. Linear in the ancilla.
CMatrix dilation_choi(const CMatrix& u, Index dim_s, Index dim_e, const CMatrix& ancilla);

}  // namespace ttr
