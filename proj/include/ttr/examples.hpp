#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttr/approx.hpp"
#include "ttr/collision.hpp"
#include "ttr/petz.hpp"
#include "ttr/specfile.hpp"

namespace ttr::examples {

struct Expected {
  std::optional<bool> exact_ttr;
  std::optional<bool> product_preserving;
  std::optional<HermMatrix> xi_prime;
};

struct NamedExample {
  std::string name;
  HermMatrix gamma;
  std::optional<TTRInstance> instance;
  std::optional<HamiltonianDilation> hamiltonian;
  std::optional<CollisionSpec> collision;
  Expected expected;
};

HermMatrix gibbs(double beta, const HermMatrix& h);
// exp(-i angle (|01><10| + |10><01|)) on two qubits.
CMatrix partial_swap(double angle);
// |01><10| + |10><01|
HermMatrix exchange_interaction();

// Unital channel with xi = 1/d; gamma must be steady.
NamedExample make_unital(Index d, const CMatrix& u, const HermMatrix& gamma);
// Controlled-X with xi = diag(p, 1-p), gamma = diag(r, 1-r).
NamedExample make_cx(double p, double r);
// exp(-i theta XX) with the rotated witness u xi u^dag, u = exp(-i theta X).
NamedExample make_xx(double theta, const HermMatrix& xi, const HermMatrix& gamma);
// Thermal operation: [U, H_S (x) 1 + 1 (x) H_E] = 0, Gibbs ancilla and prior.
NamedExample make_thermal(double beta, const HermMatrix& h_s, const HermMatrix& h_e,
                          const CMatrix& u);
// Energy-conserving Hamiltonian family H_S + H_E + H_int with [H_int, H_S + H_E] = 0;
// the instance is taken at evolution time t.
NamedExample make_thermal_family(double beta, const HermMatrix& h_s, const HermMatrix& h_e,
                                 const HermMatrix& h_int, double t = 1.0);

// Two qubits exchanging excitations with matched Gibbs states; exact at every step.
NamedExample make_collision_thermal(double beta, double omega, double rate);
// Qubit coupled to a qutrit through two exchange channels; the Petz generator
// is matched only by a prior-dependent ancilla.
NamedExample make_collision_qutrit(double kappa = 0.5, double rate = 1.0);
// Block-diagonal |0><0| (x) H0 + |1><1| (x) H1 with a steady, commuting prior.
NamedExample make_block_dephasing(std::uint64_t seed);

std::vector<std::string> example_names();
NamedExample make_named(const std::string& name);
SpecFile to_spec_file(const NamedExample& ex);

}  // namespace ttr::examples
