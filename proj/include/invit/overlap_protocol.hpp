// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference-state overlap measurement.  A known eigenstate psi_R orthogonal
// to the target is superposed with it; three survival probabilities then fix
// both the real and the imaginary part of <target|source(t)>.

#pragma once

#include <cstdint>
#include <optional>

#include "invit/core.hpp"
#include "invit/estimator.hpp"
#include "invit/hermitian.hpp"
#include "invit/propagator.hpp"

namespace invit {

struct ProbeSet {
  StateVector psi0;    // target
  StateVector source;  // evolved state; equals psi0 for plain overlaps
  StateVector psiR;
  double lambdaR = 0.0;
  StateVector psi_plus;    // (psiR + psi0)/sqrt2
  StateVector psi_i;       // (psiR + i psi0)/sqrt2
  StateVector source_plus; // (psiR + source)/sqrt2
  double source_scale = 1.0;  // multiply inferred overlaps by this
};

// Throws ValidationError if psiR is not an eigenstate or not orthogonal to psi0.
ProbeSet build_probes(const HermitianOperator& op, const StateVector& psi0,
                      const StateVector& psiR);

// Probes for <psi0|exp(-i t H) H|psi0>: the evolved source is H psi0 / ||H psi0||
// and source_scale = ||H psi0||.
ProbeSet build_energy_probes(const HermitianOperator& op, const StateVector& psi0,
                             const StateVector& psiR);

struct ProtocolProbabilities {
  double p0 = 1.0;
  double pp = 1.0;
  double pi = 0.5;
  double t = 0.0;
};

ProtocolProbabilities protocol_probabilities(const ProbeSet& probes, const HermitianOperator& op,
                                             double t,
                                             const EvolutionBackend& backend = ExactBackend{});

// Replaces each probability by the mean of n_shots Bernoulli draws.
ProtocolProbabilities sample_shots(const ProtocolProbabilities& p, std::uint64_t n_shots,
                                   std::uint64_t seed);

// <target|source(t)> from the three probabilities.
cplx infer_direct(const ProtocolProbabilities& p, double lambdaR);

// sign_hint * sqrt(max(0, p0 - im_o^2)).  Sets *inconsistent when the
// radicand is below -tolerance.
double infer_indirect(const ProtocolProbabilities& p, double im_o, int sign_hint,
                      double tolerance = 1e-9, bool* inconsistent = nullptr);

class ProtocolOverlapProvider : public OverlapProvider {
 public:
  ProtocolOverlapProvider(const HermitianOperator& op, const StateVector& psi0,
                          const StateVector& psiR, EvolutionBackend backend = ExactBackend{},
                          std::optional<std::uint64_t> shots = std::nullopt,
                          std::uint64_t seed = 0);
  std::vector<OverlapValue> overlaps(std::span<const double> dphi) const override;
  std::string name() const override { return shots_ ? "protocol_shots" : "protocol"; }

 private:
  HermitianOperator op_;
  ProbeSet norm_probes_;
  ProbeSet energy_probes_;
  EvolutionBackend backend_;
  std::optional<std::uint64_t> shots_;
  std::uint64_t seed_;
};

}  // namespace invit
