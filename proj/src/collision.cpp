#include "ttr/collision.hpp"

#include <cmath>
#include <map>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ttr/feasibility.hpp"
#include "ttr/petz.hpp"

namespace ttr {

namespace {

const Complex kI(0.0, 1.0);

CMatrix hamiltonian_superop(const CMatrix& h) { return -kI * (spre(h) - spost(h)); }

// Superoperator of rho -> Tr_E(H (rho (x) b) H) - 1/2 {Tr_E(H^2 (1 (x) b)), rho}.
CMatrix ancilla_dissipator_superop(const CMatrix& h, Index ds, Index de, const CMatrix& b) {
  CMatrix sq = partial_trace(h * h * kron(identity(ds), b), ds, de, Keep::S);
  CMatrix s(ds * ds, ds * ds);
  CMatrix unit = CMatrix::Zero(ds, ds);
  for (Index c = 0; c < ds; ++c)
    for (Index r = 0; r < ds; ++r) {
      unit.setZero();
      unit(r, c) = 1.0;
      CMatrix out = partial_trace(h * kron(unit, b) * h, ds, de, Keep::S) -
                    0.5 * anticommutator(sq, unit);
      s.col(c * ds + r) = vec(out);
    }
  return s;
}

CMatrix weighted_dissipator(const std::vector<Jump>& jumps, Index d) {
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (const auto& j : jumps) s += j.weight * dissipator_superop(j.op);
  return s;
}

std::vector<Jump> petz_jumps(const std::vector<Jump>& fwd, const CMatrix& s, const CMatrix& si) {
  std::vector<Jump> out;
  out.reserve(fwd.size());
  for (const auto& j : fwd) out.push_back({j.weight, s * j.op.adjoint() * si});
  return out;
}

CMatrix jump_op(const CMatrix& h, Index ds, const CVector& f, const CVector& e) {
  return kron(identity(ds), f.adjoint()) * h * kron(identity(ds), e);
}

}  // namespace

CMatrix CollisionSpec::h_tot() const {
  return kron(h_s.mat(), identity(dim_e())) + kron(identity(dim_s()), h_e.mat()) + h_i.mat();
}

void CollisionSpec::validate() const {
  if (h_i.dim() != dim_s() * dim_e()) throw DomainError("interaction Hamiltonian has the wrong dimension");
  if (xi.dim() != dim_e()) throw DomainError("ancilla has the wrong dimension");
  if (dim_s() > 8) throw DomainError("system dimension above 8 is not supported");
  if (!(gamma_rate >= 0)) throw DomainError("collision rate must be non-negative");
  require_density(xi, "ancilla state");
}

std::vector<std::string> CollisionSpec::warnings() const {
  std::vector<std::string> w;
  if (gamma_rate > g * g) w.push_back("collision rate exceeds g^2; the coarse-grained generator may be unfaithful");
  return w;
}

CMatrix spre(const CMatrix& a) { return kron(identity(a.rows()), a); }
CMatrix spost(const CMatrix& b) { return kron(b.transpose(), identity(b.rows())); }

CMatrix dissipator_superop(const CMatrix& l) {
  CMatrix ld = l.adjoint();
  CMatrix ll = ld * l;
  return spre(l) * spost(ld) - 0.5 * (spre(ll) + spost(ll));
}

CMatrix vec(const CMatrix& m) { return Eigen::Map<const CMatrix>(m.data(), m.size(), 1); }

CMatrix unvec(const CMatrix& v, Index d) { return Eigen::Map<const CMatrix>(v.data(), d, d); }

LindbladGenerator::LindbladGenerator(HermMatrix hamiltonian, std::vector<Jump> jumps)
    : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  const Index d = hamiltonian_.dim();
  for (const auto& j : jumps_) {
    if (j.weight < 0) throw DomainError("jump weights must be non-negative");
    if (j.op.rows() != d || j.op.cols() != d) throw DomainError("jump operator has the wrong dimension");
  }
  superop_ = hamiltonian_superop(hamiltonian_.mat()) + weighted_dissipator(jumps_, d);
}

CMatrix LindbladGenerator::apply(const CMatrix& rho) const {
  return unvec(superop_ * vec(rho), dim());
}

double LindbladGenerator::trace_defect() const {
  return (vec(identity(dim())).adjoint() * superop_).norm();
}

CMatrix collision_step(const CollisionSpec& spec, const CMatrix& rho, double dt) {
  if (dt < 0) throw DomainError("collision_step: dt must be non-negative");
  if (rho.rows() != spec.dim_s()) throw DomainError("collision_step: state dimension mismatch");
  CMatrix u = unitary_exp(HermMatrix::symmetrize(spec.h_tot()), spec.g * dt);
  return partial_trace(u * kron(rho, spec.xi.mat()) * u.adjoint(), spec.dim_s(), spec.dim_e(),
                       Keep::S);
}

CMatrix collision_step_expanded(const CollisionSpec& spec, const CMatrix& rho, double dt) {
  const Index ds = spec.dim_s();
  const Index de = spec.dim_e();
  CMatrix h = spec.h_tot();
  CMatrix heff = spec.h_s.mat() + lamb_shift(spec.h_i, spec.xi).mat();
  CMatrix sq = partial_trace(h * h * kron(identity(ds), spec.xi.mat()), ds, de, Keep::S);
  CMatrix diss = partial_trace(h * kron(rho, spec.xi.mat()) * h, ds, de, Keep::S) -
                 0.5 * anticommutator(sq, rho);
  double gd = spec.g * dt;
  return rho - kI * gd * commutator(heff, rho) + gd * gd * diss;
}

HermMatrix lamb_shift(const HermMatrix& h_i, const HermMatrix& state) {
  const Index de = state.dim();
  if (de == 0 || h_i.dim() % de != 0) throw DomainError("lamb_shift: dimension mismatch");
  const Index ds = h_i.dim() / de;
  return HermMatrix::symmetrize(
      partial_trace(kron(identity(ds), state.mat()) * h_i.mat(), ds, de, Keep::S));
}

LindbladGenerator forward_generator(const CollisionSpec& spec,
                                    const std::optional<CMatrix>& out_basis) {
  const Index ds = spec.dim_s();
  const Index de = spec.dim_e();
  EigDecomposition xe = herm_eig(spec.xi);
  CMatrix f = out_basis ? *out_basis : xe.vectors;
  if (f.rows() != de || f.cols() != de || (f.adjoint() * f - identity(de)).norm() > 1e-10)
    throw DomainError("forward_generator: output basis is not orthonormal on E");
  CMatrix h = spec.h_tot();
  std::vector<Jump> jumps;
  for (Index j = 0; j < de; ++j)
    for (Index k = 0; k < de; ++k)
      jumps.push_back({spec.gamma_rate * std::max(xe.values(k), 0.0),
                       jump_op(h, ds, f.col(j), xe.vectors.col(k))});
  HermMatrix ham = HermMatrix::symmetrize(spec.g * (spec.h_s.mat() + lamb_shift(spec.h_i, spec.xi).mat()));
  return LindbladGenerator(ham, std::move(jumps));
}

LindbladGenerator reverse_generator(const CollisionSpec& spec, const HermMatrix& xi_prime) {
  if (xi_prime.dim() != spec.dim_e()) throw DomainError("reverse_generator: ancilla dimension mismatch");
  const Index ds = spec.dim_s();
  const Index de = spec.dim_e();
  EigDecomposition xe = herm_eig(spec.xi);
  EigDecomposition xpe = herm_eig(xi_prime);
  CMatrix h = spec.h_tot();
  std::vector<Jump> jumps;
  for (Index j = 0; j < de; ++j)
    for (Index k = 0; k < de; ++k)
      jumps.push_back({spec.gamma_rate * std::max(xpe.values(j), 0.0),
                       jump_op(h, ds, xpe.vectors.col(j), xe.vectors.col(k)).adjoint()});
  HermMatrix ham = HermMatrix::symmetrize(-spec.g * (spec.h_s.mat() + lamb_shift(spec.h_i, xi_prime).mat()));
  return LindbladGenerator(ham, std::move(jumps));
}

CMatrix m_matrix(const HermMatrix& gamma, const std::vector<Jump>& jumps, const NumericPolicy& pol) {
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  const Index d = gamma.dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (const auto& j : jumps)
    m += j.weight * (j.op.adjoint() * j.op + si * j.op * gamma.mat() * j.op.adjoint() * si);
  return m;
}

HermMatrix correction_hamiltonian(const HermMatrix& gamma, const std::vector<Jump>& jumps,
                                  const NumericPolicy& pol) {
  CMatrix m = m_matrix(gamma, jumps, pol);
  EigDecomposition e = herm_eig(gamma);
  CMatrix mt = e.vectors.adjoint() * m * e.vectors;
  const Index d = gamma.dim();
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      double sa = std::sqrt(e.values(a));
      double sb = std::sqrt(e.values(b));
      mt(a, b) *= (sa - sb) / (sa + sb) / (2.0 * kI);
    }
  return HermMatrix::symmetrize(e.vectors * mt * e.vectors.adjoint());
}

LindbladGenerator petz_generator(const CollisionSpec& spec, const HermMatrix& gamma,
                                 const std::optional<CMatrix>& out_basis, const NumericPolicy& pol) {
  LindbladGenerator fwd = forward_generator(spec, out_basis);
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  HermMatrix hc = correction_hamiltonian(gamma, fwd.jumps(), pol);
  HermMatrix ham = HermMatrix::symmetrize(-fwd.hamiltonian().mat() + hc.mat());
  return LindbladGenerator(ham, petz_jumps(fwd.jumps(), s, si));
}

HermMatrix lindblad_evolve(const LindbladGenerator& gen, const CMatrix& rho, double dt,
                           double* symmetrization_defect) {
  if (dt < 0) throw DomainError("lindblad_evolve: dt must be non-negative");
  CMatrix s = (dt * gen.superop()).exp();
  CMatrix out = unvec(s * vec(rho), gen.dim());
  if (symmetrization_defect) *symmetrization_defect = (out - out.adjoint()).norm();
  return HermMatrix::symmetrize(out);
}

QuantumChannel generator_channel(const LindbladGenerator& gen, double dt, const NumericPolicy& pol) {
  return QuantumChannel::from_superop((dt * gen.superop()).exp(), gen.dim(), pol);
}

double lemma1_gap(const CollisionSpec& spec, const HermMatrix& gamma, double dt,
                  const NumericPolicy& pol) {
  QuantumChannel fwd = generator_channel(forward_generator(spec), dt, pol);
  QuantumChannel petz = petz_map(fwd, gamma, pol);
  return channel_distance(petz, generator_channel(petz_generator(spec, gamma, std::nullopt, pol), dt, pol));
}

CMatrix petz_generator_b_matrix(const CollisionSpec& spec, const HermMatrix& gamma,
                                const NumericPolicy& pol) {
  LindbladGenerator fwd = forward_generator(spec);
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  const CMatrix& h = fwd.hamiltonian().mat();
  HermMatrix hc = correction_hamiltonian(gamma, fwd.jumps(), pol);
  CMatrix a = sylvester_sqrt_solve(gamma, fwd.apply(gamma.mat()), pol);
  const Index d = gamma.dim();
  CMatrix sll = CMatrix::Zero(d, d);
  CMatrix sandwich = CMatrix::Zero(d, d);
  for (const auto& j : fwd.jumps()) {
    sll += j.weight * j.op.adjoint() * j.op;
    sandwich += j.weight * si * j.op * gamma.mat() * j.op.adjoint() * si;
  }
  CMatrix b = kI * s * h * si - 0.5 * s * sll * si - a * si - kI * h + kI * hc.mat() + 0.5 * sandwich;
  EigDecomposition e = herm_eig(gamma);
  return e.vectors.adjoint() * b * e.vectors;
}

double detailed_balance_defect(const CollisionSpec& spec, const HermMatrix& gamma,
                               const NumericPolicy& pol) {
  LindbladGenerator fwd = forward_generator(spec);
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  double worst = 0.0;
  for (const auto& j : fwd.jumps()) {
    if (j.weight == 0.0) continue;
    CMatrix ld = j.op.adjoint();
    CMatrix conj = s * ld * si;
    double nn = ld.squaredNorm();
    if (nn < 1e-300) continue;
    Complex c = (ld.adjoint() * conj).trace() / nn;
    worst = std::max(worst, (conj - c * ld).norm());
  }
  return worst;
}

GeneratorMatchResidual theorem4_check(const CollisionSpec& spec, const HermMatrix& gamma,
                                      const HermMatrix& xi_prime, const NumericPolicy& pol) {
  LindbladGenerator fwd = forward_generator(spec);
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  HermMatrix hc = correction_hamiltonian(gamma, fwd.jumps(), pol);
  const Index d = spec.dim_s();
  CMatrix defect = spec.g * lamb_shift(spec.h_i, spec.xi).mat() - hc.mat() -
                   spec.g * lamb_shift(spec.h_i, xi_prime).mat();
  GeneratorMatchResidual r;
  r.alpha = defect.trace().real() / static_cast<double>(d);
  r.hamiltonian = (defect - r.alpha * identity(d)).norm();
  CMatrix dp = weighted_dissipator(petz_jumps(fwd.jumps(), s, si), d);
  CMatrix dt = weighted_dissipator(reverse_generator(spec, xi_prime).jumps(), d);
  r.dissipator = (dp - dt).norm();
  return r;
}

StepSolution solve_step_xi_prime(const CollisionSpec& spec, const HermMatrix& gamma,
                                 const NumericPolicy& pol) {
  const Index ds = spec.dim_s();
  const Index de = spec.dim_e();
  LindbladGenerator fwd = forward_generator(spec);
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  HermMatrix hc = correction_hamiltonian(gamma, fwd.jumps(), pol);
  CMatrix target_h = spec.g * lamb_shift(spec.h_i, spec.xi).mat() - hc.mat();
  CMatrix target_d = weighted_dissipator(petz_jumps(fwd.jumps(), s, si), ds);
  CMatrix h = spec.h_tot();

  const auto basis = hermitian_basis(de);
  const Index nb = static_cast<Index>(basis.size());
  RVector bh = realify(target_h);
  RVector bd = realify(target_d);
  AffinePsdProblem prob;
  prob.dim = de;
  prob.extra = 1;
  prob.a = RMatrix::Zero(bh.size() + bd.size(), nb + 1);
  prob.b.resize(bh.size() + bd.size());
  prob.b << bh, bd;
  for (Index l = 0; l < nb; ++l) {
    const CMatrix& b = basis[static_cast<std::size_t>(l)];
    CMatrix hl = spec.g * partial_trace(kron(identity(ds), b) * spec.h_i.mat(), ds, de, Keep::S);
    prob.a.col(l).head(bh.size()) = realify(hl);
    prob.a.col(l).tail(bd.size()) = realify(spec.gamma_rate * ancilla_dissipator_superop(h, ds, de, b));
  }
  prob.a.col(nb).head(bh.size()) = realify(identity(ds));

  AffinePsdSolution sol = solve_affine_psd(prob);
  EigDecomposition e = herm_eig(HermMatrix::symmetrize(sol.x));
  RVector v = e.values.cwiseMax(0.0);
  if (v.sum() <= 0.0) v.setConstant(1.0);
  v /= v.sum();
  StepSolution out{HermMatrix::symmetrize(e.vectors * v.cast<Complex>().asDiagonal() * e.vectors.adjoint()),
                   sol.extra(0), sol.residual, sol.min_eig};
  return out;
}

XiPrimePolicy constant_policy(HermMatrix xi_prime) {
  return [xp = std::move(xi_prime)](std::size_t, const HermMatrix&, double) { return xp; };
}

XiPrimePolicy solve_policy(const CollisionSpec& spec, const NumericPolicy& pol) {
  return [spec, pol](std::size_t, const HermMatrix& gamma, double) {
    return solve_step_xi_prime(spec, gamma, pol).xi_prime;
  };
}

std::vector<double> sample_dts(double total_time, std::size_t steps, DtDistribution dist,
                               std::uint64_t seed) {
  if (steps == 0) throw DomainError("step count must be at least 1");
  if (!(total_time > 0)) throw DomainError("total time must be positive");
  const double mean = total_time / static_cast<double>(steps);
  std::vector<double> out(steps, mean);
  if (dist == DtDistribution::Exponential) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> draw(1.0 / mean);
    for (auto& dt : out) dt = draw(rng);
  }
  return out;
}

SequentialRun sequential_reverse(const CollisionSpec& spec, const HermMatrix& gamma0,
                                 const XiPrimePolicy& policy, double total_time,
                                 std::size_t steps, const NumericPolicy& pol) {
  SequentialRun run = sequential_reverse(
      spec, gamma0, policy, sample_dts(total_time, steps, DtDistribution::Fixed, 0), pol);
  run.total_time = total_time;
  return run;
}

SequentialRun sequential_reverse(const CollisionSpec& spec, const HermMatrix& gamma0,
                                 const XiPrimePolicy& policy, const std::vector<double>& dts,
                                 const NumericPolicy& pol) {
  if (dts.empty()) throw DomainError("sequential_reverse: need at least one step");
  spec.validate();
  const Index d = spec.dim_s();
  LindbladGenerator fwd = forward_generator(spec);
  std::map<double, CMatrix> fwd_cache;

  SequentialRun run;
  run.steps = dts.size();
  run.dts = dts;
  for (double dt : dts) run.total_time += dt;
  run.prior_trajectory.push_back(gamma0);
  CMatrix comp_p = identity(d * d);
  CMatrix comp_t = identity(d * d);

  for (std::size_t n = 0; n < dts.size(); ++n) {
    const double dt = dts[n];
    const HermMatrix& prior = run.prior_trajectory.back();
    auto it = fwd_cache.find(dt);
    if (it == fwd_cache.end()) it = fwd_cache.emplace(dt, (dt * fwd.superop()).exp()).first;
    const CMatrix& sf = it->second;
    double lo = herm_eig(prior).values.minCoeff();
    run.min_eig_prior.push_back(lo);
    try {
      QuantumChannel petz = petz_map(QuantumChannel::from_superop(sf, d, pol), prior, pol);
      HermMatrix xp = policy(n, prior, dt);
      CMatrix st = (dt * reverse_generator(spec, xp).superop()).exp();
      QuantumChannel rev = QuantumChannel::from_superop(st, d, pol);
      run.per_step_gaps.push_back(channel_distance(petz, rev));
      run.xi_primes.push_back(xp);
      comp_p = comp_p * petz.superop();
      comp_t = comp_t * st;
      run.cumulative_gaps.push_back(channel_distance(QuantumChannel::from_superop(comp_p, d, pol),
                                                     QuantumChannel::from_superop(comp_t, d, pol)));
    } catch (const RankError& e) {
      throw TrajectoryRankError("rank loss at step " + std::to_string(n + 1) + ": " + e.what(),
                                e.eigenvalue(), n + 1);
    }
    run.prior_trajectory.push_back(HermMatrix::symmetrize(unvec(sf * vec(prior.mat()), d)));
  }
  run.total_gap = run.cumulative_gaps.back();
  return run;
}

}  // namespace ttr
