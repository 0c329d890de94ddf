#include "ttr/channel.hpp"

#include <cmath>
#include <sstream>

namespace ttr {

Dilation::Dilation(Index dim_s, Index dim_e, CMatrix u, HermMatrix xi)
    : dim_s_(dim_s), dim_e_(dim_e), u_(std::move(u)), xi_(std::move(xi)) {
  if (dim_s < 1 || dim_e < 1) throw DomainError("dilation dimensions must be positive");
  if (u_.rows() != dim_s * dim_e || u_.cols() != dim_s * dim_e)
    throw DomainError("dilation unitary has the wrong dimension");
  if (xi_.dim() != dim_e) throw DomainError("ancilla dimension does not match dim_E");
  double defect = unitarity_defect(u_);
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "dilation matrix is not unitary (defect " << defect << ")";
    throw DomainError(os.str());
  }
  require_density(xi_, "ancilla state", 1e-12 * std::max<double>(1.0, dim_e));
}

QuantumChannel QuantumChannel::from_kraus(std::vector<CMatrix> kraus) {
  if (kraus.empty()) throw DomainError("channel needs at least one Kraus operator");
  QuantumChannel ch;
  ch.dim_out_ = kraus.front().rows();
  ch.dim_in_ = kraus.front().cols();
  const Index n = ch.dim_in_ * ch.dim_out_;
  CMatrix j = CMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.rows() != ch.dim_out_ || k.cols() != ch.dim_in_)
      throw DomainError("Kraus operators must share one shape");
    // Column stacking of K puts K(o, i) at i * dim_out + o, the Choi index.
    Eigen::Map<const CVector> v(k.data(), n);
    j.noalias() += v * v.adjoint();
  }
  ch.kraus_ = std::move(kraus);
  ch.choi_ = HermMatrix::symmetrize(j);
  return ch;
}

QuantumChannel QuantumChannel::from_choi(const HermMatrix& choi, Index dim_in, Index dim_out,
                                         const NumericPolicy& pol) {
  if (choi.dim() != dim_in * dim_out) throw DomainError("Choi matrix has the wrong dimension");
  EigDecomposition e = herm_eig(choi);
  double top = std::max(e.values.maxCoeff(), 0.0);
  std::vector<CMatrix> kraus;
  for (Index a = e.values.size() - 1; a >= 0; --a) {
    double w = e.values(a);
    if (w <= pol.rank_tol * std::max(top, 1.0)) continue;
    CVector v = std::sqrt(w) * e.vectors.col(a);
    kraus.push_back(Eigen::Map<const CMatrix>(v.data(), dim_out, dim_in));
  }
  if (kraus.empty()) kraus.push_back(CMatrix::Zero(dim_out, dim_in));
  QuantumChannel ch;
  ch.dim_in_ = dim_in;
  ch.dim_out_ = dim_out;
  ch.kraus_ = std::move(kraus);
  ch.choi_ = choi;
  return ch;
}

QuantumChannel QuantumChannel::from_superop(const CMatrix& s, Index dim,
                                            const NumericPolicy& pol) {
  if (s.rows() != dim * dim || s.cols() != dim * dim)
    throw DomainError("superoperator has the wrong dimension");
  CMatrix j(dim * dim, dim * dim);
  for (Index i = 0; i < dim; ++i)
    for (Index jj = 0; jj < dim; ++jj)
      for (Index o = 0; o < dim; ++o)
        for (Index o2 = 0; o2 < dim; ++o2)
          j(i * dim + o, jj * dim + o2) = s(o2 * dim + o, jj * dim + i);
  return from_choi(HermMatrix::symmetrize(j), dim, dim, pol);
}

CMatrix QuantumChannel::superop() const {
  CMatrix s = CMatrix::Zero(dim_out_ * dim_out_, dim_in_ * dim_in_);
  for (const auto& k : kraus_) s.noalias() += kron(k.conjugate(), k);
  return s;
}

QuantumChannel channel_from_dilation(const Dilation& d, const std::optional<CMatrix>& out_basis,
                                     const NumericPolicy& pol) {
  const Index ds = d.dim_s();
  const Index de = d.dim_e();
  CMatrix f = out_basis ? *out_basis : identity(de);
  if (f.rows() != de || f.cols() != de) throw DomainError("output basis has the wrong size");
  if ((f.adjoint() * f - identity(de)).norm() > 1e-10)
    throw DomainError("output basis is not orthonormal");
  EigDecomposition xe = herm_eig(d.xi());
  std::vector<CMatrix> kraus;
  for (Index k = 0; k < de; ++k) {
    double p = xe.values(k);
    if (p <= pol.rank_tol) continue;
    CMatrix right = kron(identity(ds), xe.vectors.col(k));
    for (Index j = 0; j < de; ++j) {
      CMatrix left = kron(identity(ds), f.col(j).adjoint());
      kraus.push_back(std::sqrt(p) * left * d.u() * right);
    }
  }
  return QuantumChannel::from_kraus(std::move(kraus));
}

CMatrix apply(const QuantumChannel& ch, const CMatrix& rho) {
  if (rho.rows() != ch.dim_in() || rho.cols() != ch.dim_in())
    throw DomainError("apply: input dimension mismatch");
  CMatrix out = CMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& k : ch.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

CMatrix adjoint_apply(const QuantumChannel& ch, const CMatrix& x) {
  if (x.rows() != ch.dim_out() || x.cols() != ch.dim_out())
    throw DomainError("adjoint_apply: input dimension mismatch");
  CMatrix out = CMatrix::Zero(ch.dim_in(), ch.dim_in());
  for (const auto& k : ch.kraus()) out.noalias() += k.adjoint() * x * k;
  return out;
}

const HermMatrix& choi(const QuantumChannel& ch) { return ch.choi(); }

CptpReport is_cptp(const QuantumChannel& ch, const NumericPolicy& pol) {
  CMatrix s = CMatrix::Zero(ch.dim_in(), ch.dim_in());
  for (const auto& k : ch.kraus()) s.noalias() += k.adjoint() * k;
  s -= identity(ch.dim_in());
  CptpReport r;
  r.tp_residual = s.norm();
  r.tp_max_entry = s.cwiseAbs().maxCoeff();
  r.min_choi_eig = herm_eig(ch.choi()).values.minCoeff();
  r.ok = r.tp_residual <= pol.cptp_tol && r.min_choi_eig >= -pol.cptp_tol;
  return r;
}

double channel_distance(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw DomainError("channel_distance: dimension mismatch");
  return 0.5 * trace_norm(a.choi().mat() - b.choi().mat()) / static_cast<double>(a.dim_in());
}

QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b,
                       const NumericPolicy& pol) {
  if (a.dim_in() != b.dim_out()) throw DomainError("compose: dimension mismatch");
  if (a.dim_in() == a.dim_out() && b.dim_in() == b.dim_out())
    return QuantumChannel::from_superop(a.superop() * b.superop(), a.dim_in(), pol);
  std::vector<CMatrix> kraus;
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) kraus.push_back(ka * kb);
  return QuantumChannel::from_kraus(std::move(kraus));
}

CMatrix dilation_choi(const CMatrix& u, Index dim_s, Index dim_e, const CMatrix& ancilla) {
  CMatrix j = CMatrix::Zero(dim_s * dim_s, dim_s * dim_s);
  CMatrix unit = CMatrix::Zero(dim_s, dim_s);
  for (Index a = 0; a < dim_s; ++a) {
    for (Index b = 0; b < dim_s; ++b) {
      unit.setZero();
      unit(a, b) = 1.0;
      CMatrix out = partial_trace(u * kron(unit, ancilla) * u.adjoint(), dim_s, dim_e, Keep::S);
      j.block(a * dim_s, b * dim_s, dim_s, dim_s) = out;
    }
  }
  return j;
}

}  // namespace ttr
