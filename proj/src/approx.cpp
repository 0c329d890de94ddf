#include "ttr/approx.hpp"

#include <cmath>
#include <future>

#include "ttr/feasibility.hpp"

namespace ttr {

namespace {

const Complex kI(0.0, 1.0);

// Tr_E(H (1 (x) state)) for an arbitrary (not necessarily positive) state.
CMatrix h_eff(const CMatrix& h, Index ds, Index de, const CMatrix& state) {
  return partial_trace(h * kron(identity(ds), state), ds, de, Keep::S);
}

// Tr_E(H (rho (x) state) H) - 1/2 {Tr_E(H^2 (1 (x) state)), rho}; linear in state.
CMatrix t2_term(const CMatrix& h, Index ds, Index de, const CMatrix& state, const CMatrix& rho) {
  CMatrix sandwich = partial_trace(h * kron(rho, state) * h, ds, de, Keep::S);
  CMatrix sq = partial_trace(h * h * kron(identity(ds), state), ds, de, Keep::S);
  return sandwich - 0.5 * anticommutator(sq, rho);
}

// Adjoint forward dissipator: sum_k p_k (L^dag X L - 1/2 {L^dag L, X}).
CMatrix dissipator_adjoint(const CMatrix& h, Index ds, Index de, const CMatrix& xi,
                           const CMatrix& x) {
  CMatrix sandwich =
      partial_trace(kron(identity(ds), xi) * h * kron(x, identity(de)) * h, ds, de, Keep::S);
  CMatrix sq = partial_trace(h * h * kron(identity(ds), xi), ds, de, Keep::S);
  return sandwich - 0.5 * anticommutator(sq, x);
}

// Forward dissipator sum_k p_k (L X L^dag - 1/2 {L^dag L, X}).
CMatrix dissipator(const CMatrix& h, Index ds, Index de, const CMatrix& xi, const CMatrix& x) {
  return t2_term(h, ds, de, xi, x);
}

struct Sides {
  std::vector<CMatrix> first;
  std::vector<CMatrix> second;
};

struct PriorParts {
  CMatrix s;
  CMatrix si;
  CMatrix h;        // g-scaled effective Hamiltonian
  CMatrix a_minus;  // solves s A + A s = -i[H, gamma]
};

PriorParts prior_parts(const HamiltonianDilation& hd, const HermMatrix& gamma,
                       const NumericPolicy& pol) {
  PriorParts pp;
  pp.s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  pp.si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  pp.h = h_eff(hd.scaled(), hd.dim_s, hd.dim_e, hd.xi.mat());
  pp.a_minus = a_operator(gamma, HermMatrix::symmetrize(pp.h), pol);
  return pp;
}

std::pair<CMatrix, CMatrix> first_order_lines(const PriorParts& pp) {
  CMatrix l1 = pp.s * pp.h * pp.si + kI * pp.a_minus * pp.si;
  CMatrix l2 = pp.si * pp.h * pp.s - kI * pp.si * pp.a_minus;
  return {l1, l2};
}

void check_steady_commuting(const HamiltonianDilation& hd, const HermMatrix& gamma,
                            const NumericPolicy& pol) {
  CMatrix comm = commutator(kron(gamma.mat(), identity(hd.dim_e)), hd.h_tot.mat());
  double scale = std::max(1.0, hd.h_tot.mat().norm());
  if (comm.norm() > pol.equality_tol * scale)
    throw ModeError("steady_commuting mode: prior does not commute with the total Hamiltonian");
  QuantumChannel ch = channel_from_dilation(hd.dilation(1e-3), std::nullopt, pol);
  if ((ttr::apply(ch, gamma.mat()) - gamma.mat()).norm() > 1e-9)
    throw ModeError("steady_commuting mode: prior is not a steady state");
}

void check_maximally_mixed(const HermMatrix& gamma, const NumericPolicy& pol) {
  if ((gamma.mat() - maximally_mixed(gamma.dim()).mat()).norm() > pol.equality_tol)
    throw ModeError("maximally_mixed mode: prior is not maximally mixed");
}

Sides petz_sides(const HamiltonianDilation& hd, const HermMatrix& gamma, int order,
                 SecondOrderMode mode, const NumericPolicy& pol) {
  Sides sides;
  const CMatrix hg = hd.scaled();
  const Index ds = hd.dim_s;
  const Index de = hd.dim_e;
  if (mode == SecondOrderMode::General) {
    PriorParts pp = prior_parts(hd, gamma, pol);
    auto [l1, l2] = first_order_lines(pp);
    sides.first = {l1, l2};
  } else {
    if (mode == SecondOrderMode::SteadyCommuting) check_steady_commuting(hd, gamma, pol);
    else check_maximally_mixed(gamma, pol);
    sides.first = {h_eff(hg, ds, de, hd.xi.mat())};
  }
  if (order < 2) return sides;
  for (const CMatrix& rho : hermitian_basis(ds)) {
    switch (mode) {
      case SecondOrderMode::General:
        sides.second.push_back(petz_second_order_term(hd, gamma, rho, pol));
        break;
      case SecondOrderMode::SteadyCommuting:
        sides.second.push_back(dissipator_adjoint(hg, ds, de, hd.xi.mat(), rho));
        break;
      case SecondOrderMode::MaximallyMixed: {
        CMatrix sandwich = partial_trace(kron(identity(ds), hd.xi.mat()) * hg *
                                             kron(rho, identity(de)) * hg,
                                         ds, de, Keep::S);
        CMatrix sq = partial_trace(hg * kron(identity(ds), hd.xi.mat()) * hg, ds, de, Keep::S);
        sides.second.push_back(sandwich - 0.5 * anticommutator(sq, rho));
        break;
      }
    }
  }
  return sides;
}

Sides tabletop_sides(const HamiltonianDilation& hd, const CMatrix& xi_prime, int order) {
  Sides sides;
  const CMatrix hg = hd.scaled();
  sides.first = {h_eff(hg, hd.dim_s, hd.dim_e, xi_prime)};
  if (order < 2) return sides;
  for (const CMatrix& rho : hermitian_basis(hd.dim_s))
    sides.second.push_back(t2_term(hg, hd.dim_s, hd.dim_e, xi_prime, rho));
  return sides;
}

double sides_defect(const Sides& petz, const Sides& table) {
  double worst = 0.0;
  for (const auto& f : petz.first) worst = std::max(worst, (f - table.first.front()).norm());
  for (std::size_t a = 0; a < petz.second.size(); ++a)
    worst = std::max(worst, (petz.second[a] - table.second[a]).norm());
  return worst;
}

}  // namespace

void HamiltonianDilation::validate() const {
  if (dim_s < 1 || dim_e < 1) throw DomainError("dimensions must be positive");
  if (h_tot.dim() != dim_s * dim_e) throw DomainError("total Hamiltonian has the wrong dimension");
  if (xi.dim() != dim_e) throw DomainError("ancilla has the wrong dimension");
  require_density(xi, "ancilla state");
}

CMatrix HamiltonianDilation::unitary(double dt) const { return unitary_exp(h_tot, g * dt); }

Dilation HamiltonianDilation::dilation(double dt) const {
  return Dilation(dim_s, dim_e, unitary(dt), xi);
}

HermMatrix effective_hamiltonian(const HamiltonianDilation& hd, const HermMatrix& state) {
  if (state.dim() != hd.dim_e) throw DomainError("effective_hamiltonian: state dimension mismatch");
  return HermMatrix::symmetrize(h_eff(hd.h_tot.mat(), hd.dim_s, hd.dim_e, state.mat()));
}

CMatrix a_operator(const HermMatrix& gamma, const HermMatrix& h, const NumericPolicy& pol) {
  if (h.dim() != gamma.dim()) throw DomainError("a_operator: dimension mismatch");
  return sylvester_sqrt_solve(gamma, -kI * commutator(h.mat(), gamma.mat()), pol);
}

FirstOrderResidual first_order_residual(const HamiltonianDilation& hd, const HermMatrix& gamma,
                                        const HermMatrix& xi_prime, const NumericPolicy& pol) {
  PriorParts pp = prior_parts(hd, gamma, pol);
  auto [l1, l2] = first_order_lines(pp);
  CMatrix rhs = h_eff(hd.scaled(), hd.dim_s, hd.dim_e, xi_prime.mat());
  return {(l1 - rhs).norm(), (l2 - rhs).norm()};
}

CMatrix b_operator(const HamiltonianDilation& hd, const HermMatrix& gamma, const CMatrix& a,
                   const NumericPolicy& pol) {
  CMatrix s = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  CMatrix si = mat_func(gamma, ScalarFn::InvSqrt, pol).mat();
  CMatrix c = a * a + s * a * si * a + a * si * a * s -
              dissipator(hd.scaled(), hd.dim_s, hd.dim_e, hd.xi.mat(), gamma.mat());
  return sylvester_sqrt_solve(gamma, c, pol);
}

SecondOrderMode parse_mode(const std::string& s) {
  if (s == "general") return SecondOrderMode::General;
  if (s == "steady_commuting") return SecondOrderMode::SteadyCommuting;
  if (s == "maximally_mixed") return SecondOrderMode::MaximallyMixed;
  throw ModeError("unknown second-order mode: " + s);
}

const char* to_string(SecondOrderMode m) {
  switch (m) {
    case SecondOrderMode::General: return "general";
    case SecondOrderMode::SteadyCommuting: return "steady_commuting";
    case SecondOrderMode::MaximallyMixed: return "maximally_mixed";
  }
  return "general";
}

CMatrix petz_second_order_term(const HamiltonianDilation& hd, const HermMatrix& gamma,
                               const CMatrix& rho, const NumericPolicy& pol) {
  PriorParts pp = prior_parts(hd, gamma, pol);
  const CMatrix& s = pp.s;
  const CMatrix& si = pp.si;
  CMatrix a = -pp.a_minus;  // solves s A + A s = +i[H, gamma]
  CMatrix b = b_operator(hd, gamma, a, pol);
  CMatrix x1 = si * a * si * rho * si + si * rho * si * a * si;
  CMatrix inner = si * rho * si;
  return b * si * rho + rho * si * b + a * si * rho * si * a +
         s * (kI * commutator(pp.h, x1)) * s +
         s * dissipator_adjoint(hd.scaled(), hd.dim_s, hd.dim_e, hd.xi.mat(), inner) * s;
}

CMatrix tabletop_second_order_term(const HamiltonianDilation& hd, const CMatrix& xi_prime,
                                   const CMatrix& rho) {
  return t2_term(hd.scaled(), hd.dim_s, hd.dim_e, xi_prime, rho);
}

double second_order_residual(const HamiltonianDilation& hd, const HermMatrix& gamma,
                             const HermMatrix& xi_prime, SecondOrderMode mode,
                             const NumericPolicy& pol) {
  Sides petz = petz_sides(hd, gamma, 2, mode, pol);
  Sides table = tabletop_sides(hd, xi_prime.mat(), 2);
  return sides_defect(petz, table);
}

OrderWitness solve_order_xi_prime(const HamiltonianDilation& hd, const HermMatrix& gamma,
                                  int order, SecondOrderMode mode, const NumericPolicy& pol) {
  if (order != 1 && order != 2) throw DomainError("order must be 1 or 2");
  Sides petz = petz_sides(hd, gamma, order, mode, pol);
  const auto basis = hermitian_basis(hd.dim_e);
  std::vector<Sides> cols;
  for (const auto& b : basis) cols.push_back(tabletop_sides(hd, b, order));

  std::vector<RVector> rhs_blocks;
  std::vector<RMatrix> lhs_blocks;
  auto add_block = [&](const CMatrix& target, auto&& column_of) {
    RVector r = realify(target);
    RMatrix m(r.size(), static_cast<Index>(basis.size()));
    for (std::size_t l = 0; l < basis.size(); ++l) m.col(static_cast<Index>(l)) = realify(column_of(l));
    rhs_blocks.push_back(r);
    lhs_blocks.push_back(m);
  };
  for (const auto& f : petz.first)
    add_block(f, [&](std::size_t l) -> const CMatrix& { return cols[l].first.front(); });
  for (std::size_t a = 0; a < petz.second.size(); ++a)
    add_block(petz.second[a], [&](std::size_t l) -> const CMatrix& { return cols[l].second[a]; });

  Index rows = 0;
  for (const auto& r : rhs_blocks) rows += r.size();
  AffinePsdProblem prob;
  prob.dim = hd.dim_e;
  prob.a.resize(rows, static_cast<Index>(basis.size()));
  prob.b.resize(rows);
  Index at = 0;
  for (std::size_t i = 0; i < rhs_blocks.size(); ++i) {
    prob.a.middleRows(at, rhs_blocks[i].size()) = lhs_blocks[i];
    prob.b.segment(at, rhs_blocks[i].size()) = rhs_blocks[i];
    at += rhs_blocks[i].size();
  }
  AffinePsdSolution sol = solve_affine_psd(prob);

  EigDecomposition e = herm_eig(HermMatrix::symmetrize(sol.x));
  RVector v = e.values.cwiseMax(0.0);
  if (v.sum() <= 0.0) v.setConstant(1.0);
  v /= v.sum();
  OrderWitness w{HermMatrix::symmetrize(e.vectors * v.cast<Complex>().asDiagonal() *
                                        e.vectors.adjoint()),
                 sol.residual, sol.min_eig, false};
  w.feasible = sol.residual <= pol.equality_tol && sol.min_eig >= -pol.rank_tol;
  return w;
}

double map_mismatch(const HamiltonianDilation& hd, const HermMatrix& gamma,
                    const HermMatrix& xi_prime, double dt, const NumericPolicy& pol) {
  if (!(dt > 0)) throw DomainError("map_mismatch: dt must be positive");
  Dilation d = hd.dilation(dt);
  QuantumChannel fwd = channel_from_dilation(d, std::nullopt, pol);
  return channel_distance(petz_map(fwd, gamma, pol), tabletop_reverse(d, xi_prime, pol));
}

SlopeFit scaling_exponent(const std::vector<std::pair<double, double>>& points, double floor) {
  return fit_loglog(points, floor, 6);
}

SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& points, double floor,
                    std::size_t min_points) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [dt, v] : points) {
    if (dt > 0 && v > floor) {
      xs.push_back(std::log(dt));
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < std::max<std::size_t>(min_points, 2))
    throw FitError("scaling fit needs at least " + std::to_string(std::max<std::size_t>(min_points, 2)) +
                   " points above the numerical floor (got " +
                   std::to_string(xs.size()) + ")");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0) throw FitError("scaling fit needs distinct dt values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.used = xs.size();
  return f;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi > lo) || points < 2) throw DomainError("log_grid: need 0 < lo < hi, points >= 2");
  std::vector<double> out;
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(lo * std::exp(step * i));
  out.back() = hi;
  return out;
}

std::vector<std::pair<double, double>> mismatch_grid(const HamiltonianDilation& hd,
                                                     const HermMatrix& gamma,
                                                     const HermMatrix& xi_prime,
                                                     const std::vector<double>& dts,
                                                     const NumericPolicy& pol) {
  std::vector<std::future<double>> jobs;
  jobs.reserve(dts.size());
  for (double dt : dts)
    jobs.push_back(std::async(std::launch::async,
                              [&, dt] { return map_mismatch(hd, gamma, xi_prime, dt, pol); }));
  std::vector<std::pair<double, double>> out;
  out.reserve(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) out.emplace_back(dts[i], jobs[i].get());
  return out;
}

}  // namespace ttr
