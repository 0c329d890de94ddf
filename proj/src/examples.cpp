#include "ttr/examples.hpp"

#include <cmath>
#include <numbers>

#include "ttr/random.hpp"

namespace ttr::examples {

namespace {

CMatrix ket_bra(Index d, Index i, Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

void require_full_rank_density(const HermMatrix& m, const char* name) {
  require_density(m, name);
  if (herm_eig(m).values.minCoeff() <= 1e-10)
    throw RankError(std::string(name) + " must be full rank", herm_eig(m).values.minCoeff());
}

HermMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return HermMatrix::symmetrize(m);
}

}  // namespace

HermMatrix gibbs(double beta, const HermMatrix& h) {
  HermMatrix w = mat_func(h, [beta](double x) { return std::exp(-beta * x); });
  return HermMatrix::symmetrize(w.mat() / w.mat().trace().real());
}

CMatrix partial_swap(double angle) { return unitary_exp(exchange_interaction(), angle); }

HermMatrix exchange_interaction() {
  return HermMatrix::symmetrize(ket_bra(4, 1, 2) + ket_bra(4, 2, 1));
}

NamedExample make_unital(Index d, const CMatrix& u, const HermMatrix& gamma) {
  HermMatrix xi = maximally_mixed(d);
  Dilation dil(d, d, u, xi);
  require_full_rank_density(gamma, "prior");
  QuantumChannel ch = channel_from_dilation(dil);
  double drift = (ttr::apply(ch, gamma.mat()) - gamma.mat()).norm();
  if (drift > 1e-9)
    throw DomainError("prior is not steady for the unital channel (drift " + std::to_string(drift) + ")");
  NamedExample ex{"unital", gamma, TTRInstance{dil, gamma, xi}, std::nullopt, std::nullopt, {}};
  ex.expected.exact_ttr = true;
  ex.expected.xi_prime = xi;
  return ex;
}

NamedExample make_cx(double p, double r) {
  if (!(p > 0 && p < 1) || !(r > 0 && r < 1))
    throw RankError("controlled-X example needs p and r strictly inside (0, 1)", std::min(p, r));
  CMatrix u = kron(ket_bra(2, 0, 0), identity(2)) + kron(ket_bra(2, 1, 1), pauli_x());
  HermMatrix xi = diag2(p, 1 - p);
  HermMatrix gamma = diag2(r, 1 - r);
  NamedExample ex{"cx", gamma, TTRInstance{Dilation(2, 2, u, xi), gamma, xi}, std::nullopt,
                  std::nullopt, {}};
  ex.expected.exact_ttr = true;
  ex.expected.product_preserving = std::abs(p - 0.5) < 1e-15;
  ex.expected.xi_prime = xi;
  return ex;
}

NamedExample make_xx(double theta, const HermMatrix& xi, const HermMatrix& gamma) {
  if (commutator(gamma.mat(), pauli_x()).norm() > 1e-10)
    throw DomainError("XX example needs a prior commuting with X");
  require_full_rank_density(xi, "ancilla state");
  require_full_rank_density(gamma, "prior");
  HermMatrix xx = HermMatrix::symmetrize(kron(pauli_x(), pauli_x()));
  HamiltonianDilation hd{2, 2, xx, xi, 1.0};
  CMatrix u = unitary_exp(HermMatrix::symmetrize(pauli_x()), theta);
  HermMatrix witness = HermMatrix::symmetrize(u * xi.mat() * u.adjoint());
  if (commutator(xi.mat(), pauli_x()).norm() <= 1e-10 || commutator(xi.mat(), pauli_z()).norm() <= 1e-10)
    witness = xi;
  NamedExample ex{"xx", gamma, TTRInstance{hd.dilation(theta), gamma, witness}, hd, std::nullopt, {}};
  ex.expected.exact_ttr = true;
  ex.expected.xi_prime = witness;
  if (std::abs(std::sin(2 * theta)) < 1e-12) ex.expected.product_preserving = true;
  return ex;
}

NamedExample make_thermal(double beta, const HermMatrix& h_s, const HermMatrix& h_e, const CMatrix& u) {
  const Index ds = h_s.dim();
  const Index de = h_e.dim();
  CMatrix h0 = kron(h_s.mat(), identity(de)) + kron(identity(ds), h_e.mat());
  double res = commutator(u, h0).norm();
  if (res > 1e-10)
    throw DomainError("unitary does not conserve H_S + H_E (commutator norm " + std::to_string(res) + ")");
  HermMatrix xi = gibbs(beta, h_e);
  HermMatrix gamma = gibbs(beta, h_s);
  NamedExample ex{"thermal", gamma, TTRInstance{Dilation(ds, de, u, xi), gamma, xi}, std::nullopt,
                  std::nullopt, {}};
  ex.expected.exact_ttr = true;
  ex.expected.product_preserving = true;
  ex.expected.xi_prime = xi;
  return ex;
}

NamedExample make_thermal_family(double beta, const HermMatrix& h_s, const HermMatrix& h_e,
                                 const HermMatrix& h_int, double t) {
  const Index ds = h_s.dim();
  const Index de = h_e.dim();
  CMatrix h0 = kron(h_s.mat(), identity(de)) + kron(identity(ds), h_e.mat());
  double res = commutator(h_int.mat(), h0).norm();
  if (res > 1e-10)
    throw DomainError("interaction does not conserve H_S + H_E (commutator norm " + std::to_string(res) + ")");
  HermMatrix htot = HermMatrix::symmetrize(h0 + h_int.mat());
  NamedExample ex = make_thermal(beta, h_s, h_e, unitary_exp(htot, t));
  ex.hamiltonian = HamiltonianDilation{ds, de, htot, ex.instance->dilation.xi(), 1.0};
  ex.collision = CollisionSpec{h_s, h_e, h_int, ex.instance->dilation.xi(), 1.0, 0.0};
  return ex;
}

NamedExample make_collision_thermal(double beta, double omega, double rate) {
  HermMatrix h = HermMatrix::symmetrize(0.5 * omega * pauli_z());
  NamedExample ex = make_thermal_family(beta, h, h, exchange_interaction(), 1.0);
  ex.name = "collision-thermal";
  ex.collision->gamma_rate = rate;
  return ex;
}

NamedExample make_collision_qutrit(double kappa, double rate) {
  CMatrix sp = ket_bra(2, 1, 0);
  CMatrix sm = ket_bra(2, 0, 1);
  CMatrix hi = kron(sp, ket_bra(3, 0, 1)) + kron(sm, ket_bra(3, 1, 0)) +
               kappa * (kron(sp, ket_bra(3, 0, 2)) + kron(sm, ket_bra(3, 2, 0)));
  CMatrix xi = CMatrix::Zero(3, 3);
  xi.diagonal() << 0.5, 0.3, 0.2;
  CollisionSpec cs{HermMatrix::symmetrize(CMatrix::Zero(2, 2)), HermMatrix::symmetrize(CMatrix::Zero(3, 3)),
                   HermMatrix::symmetrize(hi), HermMatrix::symmetrize(xi), 1.0, rate};
  cs.validate();
  HermMatrix gamma = maximally_mixed(2);
  NamedExample ex{"collision-qutrit", gamma, std::nullopt,
                  HamiltonianDilation{2, 3, cs.h_i, cs.xi, 1.0}, cs, {}};
  return ex;
}

NamedExample make_block_dephasing(std::uint64_t seed) {
  Rng rng(seed);
  CMatrix h0 = 0.5 * random_hermitian(3, rng).mat();
  CMatrix h1 = 0.5 * random_hermitian(3, rng).mat();
  HermMatrix xi = random_density_mixed(3, 0.5, rng);
  HermMatrix htot = HermMatrix::symmetrize(kron(ket_bra(2, 0, 0), h0) + kron(ket_bra(2, 1, 1), h1));
  HermMatrix gamma = diag2(0.7, 0.3);
  HamiltonianDilation hd{2, 3, htot, xi, 1.0};
  return NamedExample{"block-dephasing", gamma, std::nullopt, hd, std::nullopt, {}};
}

std::vector<std::string> example_names() {
  return {"unital-swap", "cx", "xx", "thermal", "collision-thermal", "collision-qutrit",
          "block-dephasing"};
}

NamedExample make_named(const std::string& name) {
  if (name == "unital-swap") {
    CMatrix swap = CMatrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    NamedExample ex = make_unital(2, swap, maximally_mixed(2));
    ex.name = name;
    return ex;
  }
  if (name == "cx") return make_cx(0.3, 0.7);
  if (name == "xx") {
    CMatrix xi = 0.5 * (identity(2) + 0.3 * pauli_x() + 0.4 * pauli_y() + 0.2 * pauli_z());
    CMatrix gamma = 0.5 * (identity(2) - 0.4 * pauli_x());
    return make_xx(std::numbers::pi / 3, HermMatrix::symmetrize(xi), HermMatrix::symmetrize(gamma));
  }
  if (name == "thermal") {
    HermMatrix z = HermMatrix::symmetrize(pauli_z());
    HermMatrix hint = HermMatrix::symmetrize(0.7 * exchange_interaction().mat());
    return make_thermal_family(1.0, z, z, hint, 1.0);
  }
  if (name == "collision-thermal") return make_collision_thermal(1.0, 1.0, 0.5);
  if (name == "collision-qutrit") return make_collision_qutrit();
  if (name == "block-dephasing") return make_block_dephasing(7);
  throw DomainError("unknown example \"" + name + "\"");
}

SpecFile to_spec_file(const NamedExample& ex) {
  SpecFile s;
  s.name = ex.name;
  s.gamma = ex.gamma;
  if (ex.collision) {
    const CollisionSpec& c = *ex.collision;
    s.dim_s = c.dim_s();
    s.dim_e = c.dim_e();
    s.h_s = c.h_s;
    s.h_e = c.h_e;
    s.h_i = c.h_i;
    s.g = c.g;
    s.gamma_rate = c.gamma_rate;
    s.xi = c.xi;
  } else if (ex.hamiltonian) {
    s.dim_s = ex.hamiltonian->dim_s;
    s.dim_e = ex.hamiltonian->dim_e;
    s.h_tot = ex.hamiltonian->h_tot;
    s.g = ex.hamiltonian->g;
    s.xi = ex.hamiltonian->xi;
  } else {
    const Dilation& d = ex.instance->dilation;
    s.dim_s = d.dim_s();
    s.dim_e = d.dim_e();
    s.unitary = d.u();
    s.xi = d.xi();
  }
  if (ex.expected.xi_prime) s.xi_prime = ex.expected.xi_prime;
  return s;
}

}  // namespace ttr::examples
