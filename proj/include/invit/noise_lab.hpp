// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single-qubit dephasing with jump operators sqrt(gamma) Z_j.  Because
// C_j^dag C_j = gamma I the jump record is a Poisson process independent of
// the state, so a trajectory is unitary evolution with Z_j inserted at
// Poisson times.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "invit/core.hpp"
#include "invit/estimator.hpp"
#include "invit/hermitian.hpp"
#include "invit/overlap_protocol.hpp"
#include "invit/rng.hpp"

namespace invit {

struct NoiseConfig {
  double gamma = 0.0;
  int n_trajectories = 5000;
  std::uint64_t master_seed = 20190917;
  std::vector<double> gamma_sweep{0.02, 0.03, 0.045, 0.065, 0.1};
  double gamma_min = 0.02;
  std::vector<int> extrap_orders{1, 3};
  int representative_order = 3;

  void validate() const;  // throws ValidationError
};

struct JumpEvent {
  double time;
  int qubit;
};

// Jump times for one trajectory on [0, t].  Every qubit has its own stream
// derived from `seed`; times scale as 1/gamma so different rates share the
// same underlying random numbers.
std::vector<JumpEvent> draw_jumps(int n_qubits, double t, double gamma, std::uint64_t seed);

class DephasingModel {
 public:
  explicit DephasingModel(const HermitianOperator& op);

  int n_qubits() const { return n_qubits_; }
  const HermitianOperator& op() const { return op_; }

  // Evolves psi for time t, inserting Z at each jump.  Output is normalized.
  CVector evolve(const CVector& psi, double t, const std::vector<JumpEvent>& jumps) const;

 private:
  HermitianOperator op_;
  int n_qubits_ = 0;
  std::vector<CMatrix> z_eig_;  // V^dag Z_q V
};

StateVector mc_trajectory(const HermitianOperator& op, const StateVector& psi, double phi,
                          double gamma, std::uint64_t seed);

struct NoisyProbabilities {
  ProtocolProbabilities mean;
  double se_p0 = 0.0, se_pp = 0.0, se_pi = 0.0;
  cplx direct;               // infer_direct on the means, times source_scale
  double se_direct_re = 0.0;
  double se_direct_im = 0.0;
  double indirect = 0.0;     // signed by Re(direct)
  double se_indirect = 0.0;
  bool indirect_inconsistent = false;
};

NoisyProbabilities noisy_probabilities(const ProbeSet& probes, const DephasingModel& model,
                                       double t, double gamma, int n_traj,
                                       std::uint64_t master_seed);

struct FitResult {
  double intercept = 0.0;
  double std_err = 0.0;  // propagated from the point standard errors
};

double extrapolate(const std::vector<double>& gammas, const std::vector<double>& values, int order);
FitResult extrapolate_fit(const std::vector<double>& gammas, const std::vector<double>& values,
                          const std::vector<double>& stderrs, int order);

double weighted_mitigate(double dir1, double dir3, double ind1, double ind3);

struct SweepValue {
  double gamma;
  double value;
  double std_err;
};

struct MitigationRecord {
  double dphi = 0.0;
  std::vector<SweepValue> values_direct;
  std::vector<SweepValue> values_indirect;
  double extrap_dir_1 = 0.0, extrap_dir_3 = 0.0;
  double extrap_ind_1 = 0.0, extrap_ind_3 = 0.0;
  double combined = 0.0;
  double at_gamma_min_direct = 0.0;
  double at_gamma_min_indirect = 0.0;
};

// Builds the record from per-gamma values (extrapolation over gamma >= gamma_min).
MitigationRecord mitigate(double dphi, std::vector<SweepValue> direct,
                          std::vector<SweepValue> indirect, const NoiseConfig& cfg);

struct MitigationTable {
  std::vector<MitigationRecord> norm;    // one per phase, same order as input
  std::vector<MitigationRecord> energy;
};

// Runs the gamma sweep for every phase, for both the plain and the energy
// overlap.  Noiseless values are not included.
MitigationTable run_mitigation(const HermitianOperator& op, const StateVector& psi0,
                               const StateVector& psiR, const std::vector<double>& dphis,
                               const NoiseConfig& cfg);

enum class MitigatedBranch { DirectAtGammaMin, IndirectAtGammaMin, Combined };

TabulatedOverlapProvider make_provider(const MitigationTable& table, MitigatedBranch branch);

}  // namespace invit
