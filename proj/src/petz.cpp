#include "ttr/petz.hpp"

#include <cmath>

#include "ttr/feasibility.hpp"

namespace ttr {

namespace {

void require_full_rank(const HermMatrix& m, const char* name, const NumericPolicy& pol) {
  RVector v = herm_eig(m).values;
  double floor = pol.rank_tol * std::max(v.maxCoeff(), 0.0);
  if (v.minCoeff() <= floor)
    throw RankError(std::string(name) + " is not full rank (eigenvalue " +
                        std::to_string(v.minCoeff()) + ")",
                    v.minCoeff());
}

HermMatrix forward_image(const Dilation& d, const HermMatrix& gamma, const NumericPolicy& pol) {
  return HermMatrix::symmetrize(ttr::apply(channel_from_dilation(d, std::nullopt, pol), gamma.mat()));
}

const HermMatrix& need_xi_prime(const TTRInstance& inst) {
  if (!inst.xi_prime) throw DomainError("instance has no candidate reverse ancilla");
  return *inst.xi_prime;
}

RVector clamp_sqrt(const RVector& v) {
  RVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = std::sqrt(std::max(v(i), 0.0));
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

void validate_instance(const TTRInstance& inst, const NumericPolicy& pol) {
  if (inst.gamma.dim() != inst.dilation.dim_s()) throw DomainError("prior has the wrong dimension");
  require_density(inst.gamma, "prior");
  require_full_rank(inst.gamma, "prior", pol);
  require_full_rank(forward_image(inst.dilation, inst.gamma, pol), "image of the prior", pol);
  if (inst.xi_prime) {
    if (inst.xi_prime->dim() != inst.dilation.dim_e())
      throw DomainError("reverse ancilla has the wrong dimension");
    require_density(*inst.xi_prime, "reverse ancilla");
  }
}

QuantumChannel petz_map(const QuantumChannel& ch, const HermMatrix& gamma,
                        const NumericPolicy& pol) {
  if (gamma.dim() != ch.dim_in()) throw DomainError("petz_map: prior dimension mismatch");
  require_full_rank(gamma, "prior", pol);
  HermMatrix out = HermMatrix::symmetrize(ttr::apply(ch, gamma.mat()));
  CMatrix out_isqrt = mat_func(out, ScalarFn::InvSqrt, pol).mat();
  CMatrix g_sqrt = mat_func(gamma, ScalarFn::Sqrt, pol).mat();
  std::vector<CMatrix> kraus;
  kraus.reserve(ch.kraus().size());
  for (const auto& k : ch.kraus()) kraus.push_back(g_sqrt * k.adjoint() * out_isqrt);
  return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel tabletop_reverse(const Dilation& d, const HermMatrix& xi_prime,
                                const NumericPolicy& pol) {
  if (xi_prime.dim() != d.dim_e()) throw DomainError("tabletop_reverse: ancilla dimension mismatch");
  Dilation rev(d.dim_s(), d.dim_e(), d.u().adjoint(), xi_prime);
  return channel_from_dilation(rev, std::nullopt, pol);
}

double TransitionMatrix::column_defect() const {
  double worst = 0.0;
  for (Index n = 0; n < dim_s; ++n)
    for (Index k = 0; k < dim_e; ++k) {
      double s = 0.0;
      for (Index m = 0; m < dim_s; ++m)
        for (Index j = 0; j < dim_e; ++j) s += std::norm((*this)(m, j, n, k));
      worst = std::max(worst, std::abs(s - 1.0));
    }
  return worst;
}

TransitionMatrix transition_matrix(const TTRInstance& inst, const NumericPolicy& pol) {
  const HermMatrix& xp = need_xi_prime(inst);
  const Dilation& d = inst.dilation;
  TransitionMatrix t;
  t.dim_s = d.dim_s();
  t.dim_e = d.dim_e();
  t.gamma_out = herm_eig(forward_image(d, inst.gamma, pol));
  t.xi_prime = herm_eig(xp);
  t.gamma = herm_eig(inst.gamma);
  t.xi = herm_eig(d.xi());
  const Index ds = t.dim_s;
  const Index de = t.dim_e;
  // Columns U |l_n>|e_k>, rows <l'_m|<e'_j|.
  CMatrix in_basis = kron(t.gamma.vectors, t.xi.vectors);
  CMatrix out_basis = kron(t.gamma_out.vectors, t.xi_prime.vectors);
  CMatrix phi = out_basis.adjoint() * d.u() * in_basis;
  t.entries.resize(static_cast<std::size_t>(ds * de * ds * de));
  for (Index m = 0; m < ds; ++m)
    for (Index j = 0; j < de; ++j)
      for (Index n = 0; n < ds; ++n)
        for (Index k = 0; k < de; ++k)
          t.entries[static_cast<std::size_t>(((m * de + j) * ds + n) * de + k)] =
              phi(m * de + j, n * de + k);
  return t;
}

double exact_ttr_residual(const TTRInstance& inst, const NumericPolicy& pol) {
  TransitionMatrix t = transition_matrix(inst, pol);
  const Index ds = t.dim_s;
  const Index de = t.dim_e;
  RVector r = clamp_sqrt(t.gamma.values);
  RVector rp = clamp_sqrt(t.gamma_out.values);
  const RVector& p = t.xi.values;
  const RVector& pp = t.xi_prime.values;
  double worst = 0.0;
  for (Index m1 = 0; m1 < ds; ++m1)
    for (Index m2 = 0; m2 < ds; ++m2)
      for (Index n1 = 0; n1 < ds; ++n1)
        for (Index n2 = 0; n2 < ds; ++n2) {
          Complex s = 0.0;
          for (Index j = 0; j < de; ++j)
            for (Index k = 0; k < de; ++k) {
              double w = p(k) * r(n1) * r(n2) - pp(j) * rp(m1) * rp(m2);
              s += w * t(m1, j, n1, k) * std::conj(t(m2, j, n2, k));
            }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double choi_gap(const TTRInstance& inst, const NumericPolicy& pol) {
  const HermMatrix& xp = need_xi_prime(inst);
  QuantumChannel fwd = channel_from_dilation(inst.dilation, std::nullopt, pol);
  return channel_distance(petz_map(fwd, inst.gamma, pol),
                          tabletop_reverse(inst.dilation, xp, pol));
}

double bayes_residual(const TTRInstance& inst, const NumericPolicy& pol) {
  const HermMatrix& xp = need_xi_prime(inst);
  QuantumChannel fwd = channel_from_dilation(inst.dilation, std::nullopt, pol);
  QuantumChannel rev = tabletop_reverse(inst.dilation, xp, pol);
  EigDecomposition g = herm_eig(inst.gamma);
  EigDecomposition go = herm_eig(HermMatrix::symmetrize(ttr::apply(fwd, inst.gamma.mat())));
  double worst = 0.0;
  for (Index n = 0; n < g.values.size(); ++n) {
    CMatrix pn = g.vectors.col(n) * g.vectors.col(n).adjoint();
    CMatrix fwd_n = ttr::apply(fwd, pn);
    for (Index m = 0; m < go.values.size(); ++m) {
      CMatrix pm = go.vectors.col(m) * go.vectors.col(m).adjoint();
      double lhs = g.values(n) * (fwd_n * pm).trace().real();
      double rhs = go.values(m) * (ttr::apply(rev, pm) * pn).trace().real();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

bool degenerate_spectra(const TTRInstance& inst, const NumericPolicy& pol) {
  const Dilation& d = inst.dilation;
  double gap = std::min(herm_eig(inst.gamma).min_gap(), herm_eig(d.xi()).min_gap());
  gap = std::min(gap, herm_eig(forward_image(d, inst.gamma, pol)).min_gap());
  if (inst.xi_prime) gap = std::min(gap, herm_eig(*inst.xi_prime).min_gap());
  return gap < pol.degeneracy_gap;
}

ExactTTRReport feasible_xi_prime(const Dilation& d, const HermMatrix& gamma,
                                 const NumericPolicy& pol) {
  QuantumChannel fwd = channel_from_dilation(d, std::nullopt, pol);
  CMatrix target = petz_map(fwd, gamma, pol).choi().mat();

  const auto basis = hermitian_basis(d.dim_e());
  AffinePsdProblem prob;
  prob.dim = d.dim_e();
  prob.b = realify(target);
  prob.a.resize(prob.b.size(), static_cast<Index>(basis.size()));
  CMatrix udag = d.u().adjoint();
  for (std::size_t l = 0; l < basis.size(); ++l)
    prob.a.col(static_cast<Index>(l)) = realify(dilation_choi(udag, d.dim_s(), d.dim_e(), basis[l]));

  AffinePsdSolution sol = solve_affine_psd(prob);
  ExactTTRReport rep;
  rep.ls_residual = sol.residual;
  rep.best_min_eig = sol.min_eig;
  rep.nullity = sol.nullity;
  rep.iterations = sol.iterations;

  // Margin below which the ascent is trusted to have found the true maximum.
  constexpr double kAscentMargin = 1e-3;
  if (sol.residual > pol.equality_tol) {
    rep.feasible = Verdict::Infeasible;
  } else if (sol.min_eig >= -pol.rank_tol) {
    rep.feasible = Verdict::Feasible;
  } else if (sol.nullity == 0 || sol.min_eig < -kAscentMargin) {
    rep.feasible = Verdict::Infeasible;
  } else {
    rep.feasible = Verdict::Undetermined;
  }

  // Nearest state to the returned point; for feasible verdicts the projection
  // only removes the tolerated negative part.
  EigDecomposition e = herm_eig(HermMatrix::symmetrize(sol.x));
  RVector v = e.values.cwiseMax(0.0);
  if (v.sum() <= 0.0) v.setConstant(1.0);
  v /= v.sum();
  HermMatrix w = HermMatrix::symmetrize(e.vectors * v.cast<Complex>().asDiagonal() *
                                        e.vectors.adjoint());
  TTRInstance inst{d, gamma, w};
  rep.choi_gap = choi_gap(inst, pol);
  rep.theorem1_residual = exact_ttr_residual(inst, pol);
  rep.degenerate_spectra_flag = degenerate_spectra(inst, pol);
  if (rep.feasible == Verdict::Feasible) {
    if (rep.choi_gap > pol.equality_tol)
      rep.feasible = Verdict::Undetermined;
    else
      rep.witness_xi_prime = w;
  }
  return rep;
}

ProductPreservation product_preservation_check(const Dilation& d, const HermMatrix& gamma,
                                               const NumericPolicy& pol) {
  CMatrix sigma = d.u() * kron(gamma.mat(), d.xi().mat()) * d.u().adjoint();
  ProductPreservation out;
  out.gamma_out = HermMatrix::symmetrize(partial_trace(sigma, d.dim_s(), d.dim_e(), Keep::S));
  out.xi_out = HermMatrix::symmetrize(partial_trace(sigma, d.dim_s(), d.dim_e(), Keep::E));
  out.defect = (sigma - kron(out.gamma_out.mat(), out.xi_out.mat())).norm();
  out.preserved = out.defect <= pol.equality_tol;
  return out;
}

}  // namespace ttr
