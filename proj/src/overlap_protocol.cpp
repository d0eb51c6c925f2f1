// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/overlap_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "invit/rng.hpp"

namespace invit {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

ProbeSet make_probes(const HermitianOperator& op, const StateVector& psi0,
                     const StateVector& source, const StateVector& psiR) {
  if (psi0.dim() != op.dim() || psiR.dim() != op.dim())
    throw DomainError("probe state dimension mismatch");
  ProbeSet p;
  p.psi0 = psi0;
  p.source = source;
  p.psiR = psiR;
  p.lambdaR = op.expectation(psiR);
  const CVector& r = psiR.amplitudes();
  const double resid = (op.apply(r) - p.lambdaR * r).norm();
  if (resid > 1e-10 * std::max(1.0, std::abs(p.lambdaR)))
    throw ValidationError("reference state is not an eigenstate (residual " +
                          std::to_string(resid) + ")");
  if (std::abs(inner(psiR, psi0)) > 1e-10)
    throw ValidationError("reference state is not orthogonal to the initial state");
  if (std::abs(inner(psiR, source)) > 1e-10)
    throw ValidationError("reference state is not orthogonal to the source state");
  p.psi_plus = StateVector::normalized(kInvSqrt2 * (r + psi0.amplitudes()));
  p.psi_i = StateVector::normalized(kInvSqrt2 * (r + cplx(0, 1) * psi0.amplitudes()));
  p.source_plus = StateVector::normalized(kInvSqrt2 * (r + source.amplitudes()));
  return p;
}

}  // namespace

ProbeSet build_probes(const HermitianOperator& op, const StateVector& psi0,
                      const StateVector& psiR) {
  return make_probes(op, psi0, psi0, psiR);
}

ProbeSet build_energy_probes(const HermitianOperator& op, const StateVector& psi0,
                             const StateVector& psiR) {
  const CVector h = op.apply(psi0.amplitudes());
  const double beta = h.norm();
  if (!(beta > 0.0)) throw DomainError("H psi0 vanishes; energy overlaps are identically zero");
  ProbeSet p = make_probes(op, psi0, StateVector::normalized(h), psiR);
  p.source_scale = beta;
  return p;
}

ProtocolProbabilities protocol_probabilities(const ProbeSet& probes, const HermitianOperator& op,
                                             double t, const EvolutionBackend& backend) {
  if (!std::isfinite(t)) throw DomainError("evolution phase must be finite");
  const CVector s_t = evolve(backend, op, t, probes.source.amplitudes());
  const CVector sp_t = evolve(backend, op, t, probes.source_plus.amplitudes());
  ProtocolProbabilities p;
  p.t = t;
  p.p0 = std::norm(probes.psi0.amplitudes().dot(s_t));
  p.pp = std::norm(probes.psi_plus.amplitudes().dot(sp_t));
  p.pi = std::norm(probes.psi_i.amplitudes().dot(sp_t));
  return p;
}

ProtocolProbabilities sample_shots(const ProtocolProbabilities& p, std::uint64_t n_shots,
                                   std::uint64_t seed) {
  if (n_shots == 0) throw DomainError("n_shots must be >= 1");
  std::mt19937_64 gen(seed);
  auto draw = [&](double prob) {
    std::binomial_distribution<std::uint64_t> d(n_shots, std::clamp(prob, 0.0, 1.0));
    return static_cast<double>(d(gen)) / static_cast<double>(n_shots);
  };
  ProtocolProbabilities out = p;
  out.p0 = draw(p.p0);
  out.pp = draw(p.pp);
  out.pi = draw(p.pi);
  return out;
}

cplx infer_direct(const ProtocolProbabilities& p, double lambdaR) {
  const double a = 2.0 * p.pp - 0.5 * (p.p0 + 1.0);
  const double b = 2.0 * p.pi - 0.5 * (p.p0 + 1.0);
  const double th = lambdaR * p.t;
  const double c = std::cos(th), s = std::sin(th);
  return {a * c + b * s, b * c - a * s};
}

double infer_indirect(const ProtocolProbabilities& p, double im_o, int sign_hint,
                      double tolerance, bool* inconsistent) {
  const double rad = p.p0 - im_o * im_o;
  if (inconsistent) *inconsistent = rad < -tolerance;
  const double mag = std::sqrt(std::max(0.0, rad));
  return sign_hint < 0 ? -mag : mag;
}

ProtocolOverlapProvider::ProtocolOverlapProvider(const HermitianOperator& op,
                                                 const StateVector& psi0,
                                                 const StateVector& psiR,
                                                 EvolutionBackend backend,
                                                 std::optional<std::uint64_t> shots,
                                                 std::uint64_t seed)
    : op_(op),
      norm_probes_(build_probes(op, psi0, psiR)),
      energy_probes_(build_energy_probes(op, psi0, psiR)),
      backend_(std::move(backend)),
      shots_(shots),
      seed_(seed) {}

std::vector<OverlapValue> ProtocolOverlapProvider::overlaps(std::span<const double> dphi) const {
  std::vector<OverlapValue> out(dphi.size());
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    ProtocolProbabilities pn = protocol_probabilities(norm_probes_, op_, dphi[i], backend_);
    ProtocolProbabilities pe = protocol_probabilities(energy_probes_, op_, dphi[i], backend_);
    if (shots_) {
      pn = sample_shots(pn, *shots_, derive_seed(seed_, 2 * i));
      pe = sample_shots(pe, *shots_, derive_seed(seed_, 2 * i + 1));
    }
    out[i].norm = infer_direct(pn, norm_probes_.lambdaR);
    out[i].energy = energy_probes_.source_scale * infer_direct(pe, energy_probes_.lambdaR);
  }
  return out;
}

}  // namespace invit
