// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invit/core.hpp"
#include "invit/hermitian.hpp"
#include "invit/inverse_series.hpp"
#include "invit/propagator.hpp"

namespace invit {

// <psi0|exp(-i dphi H)|psi0> and <psi0|exp(-i dphi H) H|psi0>.
struct OverlapValue {
  cplx norm;
  cplx energy;
};

class OverlapProvider {
 public:
  virtual ~OverlapProvider() = default;
  virtual std::vector<OverlapValue> overlaps(std::span<const double> dphi) const = 0;
  // Whether values at negative phases are available (used for the
  // imaginary-residue cross-check).
  virtual bool supports_negative_phases() const { return true; }
  virtual std::string name() const = 0;
};

class ExactOverlapProvider : public OverlapProvider {
 public:
  ExactOverlapProvider(const HermitianOperator& op, const StateVector& psi0,
                       EvolutionBackend backend = ExactBackend{});
  std::vector<OverlapValue> overlaps(std::span<const double> dphi) const override;
  std::string name() const override { return "exact"; }

 private:
  HermitianOperator op_;
  StateVector psi0_;
  EvolutionBackend backend_;
  std::vector<double> w_norm_, w_energy_;  // spectral weights
  CVector h_psi0_;
};

// Lookup table of precomputed real parts, keyed by |delta_phi|.
class TabulatedOverlapProvider : public OverlapProvider {
 public:
  struct Row {
    double dphi;
    double re_norm;
    double re_energy;
  };
  explicit TabulatedOverlapProvider(std::vector<Row> rows, std::string label = "table");
  std::vector<OverlapValue> overlaps(std::span<const double> dphi) const override;
  bool supports_negative_phases() const override { return false; }
  std::string name() const override { return label_; }

 private:
  std::vector<Row> rows_;  // sorted by dphi
  std::string label_;
};

struct IterationReport {
  int k = 0;
  double lambda_est = 0.0;
  std::optional<double> lambda_ideal;
  double delta_lambda = 0.0;  // lambda_est - lambda_gs
  double norm_value = 0.0;    // denominator
  double numerator = 0.0;
  double imag_residue = 0.0;  // NaN when the provider cannot evaluate it
};

inline constexpr double kDefaultDenominatorFloor = 1e-10;

IterationReport estimate_energy(const HermitianOperator& op, const StateVector& psi0,
                                const PhaseLedger& ledger, const OverlapProvider& provider,
                                double floor = kDefaultDenominatorFloor);

struct IdealIterate {
  StateVector state;
  double energy = 0.0;
  bool low_overlap_warning = false;
};

IdealIterate ideal_iterate(const HermitianOperator& op, const StateVector& psi0, int k);

// Real part of <psi_k|A|psi_k>/<psi_k|psi_k> with psi_k the series applied to
// psi0; A is symmetrized to (A + A^dag)/2.  Valid for any A.
double estimate_observable(const CMatrix& a_op, const HermitianOperator& op,
                           const StateVector& psi0, const ExpansionSeries& s,
                           const EvolutionBackend& backend = ExactBackend{});

// Ledger form, only valid when A commutes with H; throws ValidationError
// otherwise.
double estimate_observable(const CMatrix& a_op, const HermitianOperator& op,
                           const StateVector& psi0, const PhaseLedger& ledger,
                           double floor = kDefaultDenominatorFloor);

// Exact <psi_k|A_sym|psi_k> for the ideal iterate (k = 0 gives psi0).
double ideal_observable(const CMatrix& a_op, const HermitianOperator& op,
                        const StateVector& psi0, int k);

struct SpectralGapInfo {
  double lambda1 = 0.0;  // eigenvalues of H^{-1}
  double lambda2 = 0.0;  // lambda2, lambda_n: over the eigenvectors psi0 overlaps
  double lambda_n = 0.0;
  double theta0 = 0.0;  // sin^2 theta0 = |<psi0|gs>|^2
};

SpectralGapInfo spectral_gap_info(const HermitianOperator& op, const StateVector& psi0);

double predicted_iterations(const SpectralGapInfo& info, double eps);

}  // namespace invit
