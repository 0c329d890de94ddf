#include "instances.hpp"

#include <cmath>

#include "oracles.hpp"

namespace gen {

namespace {

HermMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return HermMatrix(m);
}

CMatrix ket_bra(Index d, Index i, Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

double away_from_half(Rng& rng) {
  double p = oracle::uniform(rng, 0.1, 0.4);
  return oracle::uniform(rng, 0, 1) < 0.5 ? p : 1 - p;
}

}  // namespace

TTRInstance generic(Rng& rng) {
  oracle::RandomDilation r = oracle::random_qubit_pair(rng);
  return TTRInstance{Dilation(2, 2, r.u, HermMatrix::symmetrize(r.xi)), HermMatrix::symmetrize(r.gamma),
                     HermMatrix::symmetrize(r.xi_prime)};
}

TTRInstance cx(Rng& rng) {
  double p = away_from_half(rng), r = away_from_half(rng), q = away_from_half(rng);
  examples::NamedExample ex = examples::make_cx(p, r);
  TTRInstance inst = *ex.instance;
  inst.xi_prime = diag2(q, 1 - q);
  return inst;
}

TTRInstance xx(Rng& rng) {
  double theta = oracle::uniform(rng, 0.1, 1.4);
  HermMatrix xi = random_density_mixed(2, 0.3, rng);
  double a = oracle::uniform(rng, 0.2, 0.8);
  HermMatrix gamma = HermMatrix::symmetrize(0.5 * (identity(2) + a * pauli_x()));
  return *examples::make_xx(theta, xi, gamma).instance;
}

TTRInstance xx_off(Rng& rng) {
  TTRInstance inst = xx(rng);
  CMatrix shifted = inst.xi_prime->mat() + 0.1 * pauli_x();
  // keep it a density matrix by mixing toward the identity
  inst.xi_prime = HermMatrix::symmetrize(0.7 * shifted + 0.3 * 0.5 * identity(2));
  return inst;
}

examples::NamedExample thermal(Rng& rng, double t) {
  double w = oracle::uniform(rng, 0.3, 1.5);
  double beta = oracle::uniform(rng, 0.2, 2.0);
  HermMatrix h = HermMatrix::symmetrize(w * pauli_z());
  CMatrix block = random_hermitian(2, rng).mat();
  CMatrix hint = CMatrix::Zero(4, 4);
  hint(1, 1) = block(0, 0);
  hint(1, 2) = block(0, 1);
  hint(2, 1) = block(1, 0);
  hint(2, 2) = block(1, 1);
  hint += oracle::uniform(rng, -1, 1) * ket_bra(4, 0, 0) + oracle::uniform(rng, -1, 1) * ket_bra(4, 3, 3);
  return examples::make_thermal_family(beta, h, h, HermMatrix::symmetrize(hint), t);
}

bool nondegenerate(const TTRInstance& inst) {
  QuantumChannel ch = channel_from_dilation(inst.dilation);
  HermMatrix gp = HermMatrix::symmetrize(ttr::apply(ch, inst.gamma.mat()));
  for (const HermMatrix* m : std::initializer_list<const HermMatrix*>{&inst.gamma, &gp, &inst.dilation.xi(), &*inst.xi_prime})
    if (herm_eig(*m).min_gap() < 1e-6) return false;
  return true;
}

}  // namespace gen

namespace gen {

CollisionSpec collision(Rng& rng, Index ds, Index de) {
  CollisionSpec cs{HermMatrix::symmetrize(0.5 * random_hermitian(ds, rng).mat()),
                   HermMatrix::symmetrize(0.5 * random_hermitian(de, rng).mat()),
                   HermMatrix::symmetrize(0.5 * random_hermitian(ds * de, rng).mat()),
                   random_density_mixed(de, 0.3, rng), 1.0, 0.5};
  cs.validate();
  return cs;
}

HermMatrix prior(Rng& rng, Index d) { return random_density_mixed(d, 0.5, rng); }

}  // namespace gen
