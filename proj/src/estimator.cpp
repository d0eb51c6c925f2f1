// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invit/kernels.hpp"

namespace invit {

namespace {

void require_dims(const HermitianOperator& op, const StateVector& psi) {
  if (op.dim() != psi.dim()) throw DomainError("state/operator dimension mismatch");
}

CMatrix symmetrized(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

// Re sum_j w_j exp(-i dphi_i x_j) for complex weights w.
std::vector<double> re_phase_sum(const CVector& w, const RVector& x,
                                 std::span<const double> dphi) {
  const std::size_t n = static_cast<std::size_t>(w.size());
  std::vector<double> wr(n), wi(n);
  for (std::size_t j = 0; j < n; ++j) {
    wr[j] = w(j).real();
    wi[j] = w(j).imag();
  }
  std::vector<double> rr(dphi.size()), ri(dphi.size()), ir(dphi.size()), ii(dphi.size());
  const std::span<const double> xs(x.data(), n);
  kernels::phase_sum(wr, xs, dphi, rr, ri);
  kernels::phase_sum(wi, xs, dphi, ir, ii);
  std::vector<double> out(dphi.size());
  for (std::size_t i = 0; i < dphi.size(); ++i) out[i] = rr[i] - ii[i];
  return out;
}

}  // namespace

ExactOverlapProvider::ExactOverlapProvider(const HermitianOperator& op,
                                           const StateVector& psi0,
                                           EvolutionBackend backend)
    : op_(op), psi0_(psi0), backend_(std::move(backend)) {
  require_dims(op, psi0);
  const CVector t = op.to_eigenbasis(psi0.amplitudes());
  w_norm_.resize(op.dim());
  w_energy_.resize(op.dim());
  for (std::size_t j = 0; j < op.dim(); ++j) {
    w_norm_[j] = std::norm(t(j));
    w_energy_[j] = w_norm_[j] * op.eigenvalues()(j);
  }
  h_psi0_ = op.apply(psi0.amplitudes());
}

std::vector<OverlapValue> ExactOverlapProvider::overlaps(std::span<const double> dphi) const {
  std::vector<OverlapValue> out(dphi.size());
  if (std::holds_alternative<ExactBackend>(backend_)) {
    std::vector<double> nr(dphi.size()), ni(dphi.size()), er(dphi.size()), ei(dphi.size());
    const std::span<const double> ev(op_.eigenvalues().data(), op_.dim());
    kernels::phase_sum(w_norm_, ev, dphi, nr, ni);
    kernels::phase_sum(w_energy_, ev, dphi, er, ei);
    for (std::size_t i = 0; i < dphi.size(); ++i) out[i] = {{nr[i], ni[i]}, {er[i], ei[i]}};
    return out;
  }
  const std::size_t n = op_.dim();
  const CVector& p0 = psi0_.amplitudes();
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    const CVector u = evolve(backend_, op_, dphi[i], p0);
    const CVector uh = evolve(backend_, op_, dphi[i], h_psi0_);
    out[i] = {kernels::cdot({p0.data(), n}, {u.data(), n}),
              kernels::cdot({p0.data(), n}, {uh.data(), n})};
  }
  return out;
}

TabulatedOverlapProvider::TabulatedOverlapProvider(std::vector<Row> rows, std::string label)
    : rows_(std::move(rows)), label_(std::move(label)) {
  std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) { return a.dphi < b.dphi; });
}

std::vector<OverlapValue> TabulatedOverlapProvider::overlaps(std::span<const double> dphi) const {
  std::vector<OverlapValue> out;
  out.reserve(dphi.size());
  for (double d : dphi) {
    const double key = std::abs(d);
    auto it = std::lower_bound(rows_.begin(), rows_.end(), key - 1e-9 * std::max(1.0, key),
                               [](const Row& r, double v) { return r.dphi < v; });
    if (it == rows_.end() || std::abs(it->dphi - key) > 1e-9 * std::max(1.0, key))
      throw DomainError("no tabulated overlap at delta_phi = " + std::to_string(d));
    out.push_back({{it->re_norm, 0.0}, {it->re_energy, 0.0}});
  }
  return out;
}

IterationReport estimate_energy(const HermitianOperator& op, const StateVector& psi0,
                                const PhaseLedger& ledger, const OverlapProvider& provider,
                                double floor) {
  require_dims(op, psi0);
  const std::size_t q = ledger.rows.size();
  const bool neg = provider.supports_negative_phases();
  std::vector<double> phases;
  phases.reserve(1 + 2 * q);
  phases.push_back(0.0);
  for (const auto& r : ledger.rows) phases.push_back(r.delta_phi);
  if (neg)
    for (const auto& r : ledger.rows) phases.push_back(-r.delta_phi);
  const auto ov = provider.overlaps(phases);

  double num = ledger.p_zero * ov[0].energy.real();
  double den = ledger.p_zero * ov[0].norm.real();
  for (std::size_t i = 0; i < q; ++i) {
    num += ledger.rows[i].p * ov[1 + i].energy.real();
    den += ledger.rows[i].p * ov[1 + i].norm.real();
  }
  IterationReport rep;
  rep.k = ledger.k;
  rep.numerator = num;
  rep.norm_value = den;
  if (neg) {
    // Imaginary part of the unfolded double sum.
    double in = ledger.p_zero * ov[0].energy.imag();
    double id = ledger.p_zero * ov[0].norm.imag();
    for (std::size_t i = 0; i < q; ++i) {
      in += 0.5 * ledger.rows[i].p * (ov[1 + i].energy.imag() + ov[1 + q + i].energy.imag());
      id += 0.5 * ledger.rows[i].p * (ov[1 + i].norm.imag() + ov[1 + q + i].norm.imag());
    }
    rep.imag_residue = std::max(std::abs(in), std::abs(id));
  } else {
    rep.imag_residue = std::numeric_limits<double>::quiet_NaN();
  }
  if (!(std::abs(den) >= floor))
    throw IllConditionedError("estimate denominator " + std::to_string(den) +
                              " below floor at k=" + std::to_string(ledger.k));
  rep.lambda_est = num / den;
  rep.delta_lambda = rep.lambda_est - op.min_eigenvalue();
  return rep;
}

IdealIterate ideal_iterate(const HermitianOperator& op, const StateVector& psi0, int k) {
  require_dims(op, psi0);
  if (k < 0) throw DomainError("iteration count must be >= 0");
  if (k > 0 && !(op.min_eigenvalue() > 0.0))
    throw DomainError("inverse iteration needs a positive spectrum; shift the operator first");
  CVector t = op.to_eigenbasis(psi0.amplitudes());
  IdealIterate r;
  r.low_overlap_warning = std::abs(t(0)) < 1e-8;
  for (std::size_t j = 0; j < op.dim(); ++j)
    t(j) *= std::pow(op.eigenvalues()(j), -static_cast<double>(k));
  // Normalize in the eigenbasis first; H^{-k} can be tiny for large k.
  t /= t.norm();
  double e = 0.0;
  for (std::size_t j = 0; j < op.dim(); ++j) e += std::norm(t(j)) * op.eigenvalues()(j);
  r.energy = e;
  r.state = StateVector::normalized(op.from_eigenbasis(t));
  return r;
}

double estimate_observable(const CMatrix& a_op, const HermitianOperator& op,
                           const StateVector& psi0, const ExpansionSeries& s,
                           const EvolutionBackend& backend) {
  require_dims(op, psi0);
  if (static_cast<std::size_t>(a_op.rows()) != op.dim() || a_op.rows() != a_op.cols())
    throw DomainError("observable dimension mismatch");
  const SeriesApplication app = apply_series(s, op, psi0, backend);
  const double den = app.state.squaredNorm();
  if (!(den >= kDefaultDenominatorFloor))
    throw IllConditionedError("observable denominator below floor");
  return app.state.dot(symmetrized(a_op) * app.state).real() / den;
}

double estimate_observable(const CMatrix& a_op, const HermitianOperator& op,
                           const StateVector& psi0, const PhaseLedger& ledger, double floor) {
  require_dims(op, psi0);
  if (static_cast<std::size_t>(a_op.rows()) != op.dim() || a_op.rows() != a_op.cols())
    throw DomainError("observable dimension mismatch");
  const CMatrix as = symmetrized(a_op);
  const double comm = (as * op.matrix() - op.matrix() * as).norm();
  if (comm > 1e-10 * std::max(1.0, as.norm() * op.matrix().norm()))
    throw ValidationError("ledger observable estimate needs [A, H] = 0; use the series form");

  const CVector t = op.to_eigenbasis(psi0.amplitudes());
  const CVector ta = op.to_eigenbasis(as * psi0.amplitudes());
  const CVector wa = t.conjugate().cwiseProduct(ta);
  const CVector wn = t.conjugate().cwiseProduct(t);
  std::vector<double> phases{0.0};
  for (const auto& r : ledger.rows) phases.push_back(r.delta_phi);
  const auto oa = re_phase_sum(wa, op.eigenvalues(), phases);
  const auto on = re_phase_sum(wn, op.eigenvalues(), phases);
  double num = ledger.p_zero * oa[0], den = ledger.p_zero * on[0];
  for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
    num += ledger.rows[i].p * oa[1 + i];
    den += ledger.rows[i].p * on[1 + i];
  }
  if (!(std::abs(den) >= floor)) throw IllConditionedError("observable denominator below floor");
  return num / den;
}

double ideal_observable(const CMatrix& a_op, const HermitianOperator& op,
                        const StateVector& psi0, int k) {
  const IdealIterate it = ideal_iterate(op, psi0, k);
  const CVector& v = it.state.amplitudes();
  return v.dot(symmetrized(a_op) * v).real();
}

SpectralGapInfo spectral_gap_info(const HermitianOperator& op, const StateVector& psi0) {
  require_dims(op, psi0);
  if (op.dim() < 2) throw DomainError("gap info needs at least two eigenvalues");
  if (!(op.min_eigenvalue() > 0.0)) throw DomainError("gap info needs a positive spectrum");
  const RVector& ev = op.eigenvalues();
  const CMatrix& vecs = op.eigenvectors();
  const CVector& a = psi0.amplitudes();
  SpectralGapInfo g;
  g.lambda1 = 1.0 / ev(0);
  const double ov = std::abs(vecs.col(0).dot(a));
  g.theta0 = std::asin(std::min(1.0, ov));
  // Sub-dominant and smallest eigenvalues are taken over the eigenvectors psi0 actually
  // touches: components outside its support never enter the iteration. Falls back to the
  // full spectrum when psi0 sits on the ground state alone.
  const Eigen::Index n = ev.size();
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (std::norm(vecs.col(j).dot(a)) > 1e-20) {
      if (first < 0) first = j;
      last = j;
    }
  }
  if (first < 0) first = 1, last = n - 1;
  g.lambda2 = 1.0 / ev(first);
  g.lambda_n = 1.0 / ev(last);
  return g;
}

double predicted_iterations(const SpectralGapInfo& info, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  if (!(info.lambda1 > info.lambda2 * (1.0 + 1e-12)))
    throw DegenerateGapError("dominant eigenvalue of H^-1 is degenerate; iteration count diverges");
  if (!(info.theta0 > 0.0)) throw DomainError("initial state has no ground-state overlap");
  const double s2 = std::pow(std::sin(info.theta0), 2);
  return std::log(eps / s2 / (info.lambda1 - info.lambda_n)) /
         (2.0 * std::log(info.lambda2 / info.lambda1));
}

}  // namespace invit
