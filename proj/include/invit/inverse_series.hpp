// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "invit/core.hpp"
#include "invit/hermitian.hpp"
#include "invit/propagator.hpp"

namespace invit {

struct GridParams {
  int k = 1;
  int m_y = 1;
  int m_z = 1;
  double delta_y = 0.1;  // inverse energy
  double delta_z = 0.1;

  double phi_max() const { return (m_y * delta_y) * (m_z * delta_z); }
  double skew() const { return delta_y / delta_z; }
  void validate() const;  // throws ValidationError
};

// Steps from a target phi_max and skew = delta_y / delta_z.
GridParams grid_from_phi_max(int k, int m_y, int m_z, double phi_max, double skew);

// Divides delta_y by lambda_max so a grid designed for a spectrum in
// [1/kappa, 1] applies to the unnormalized operator.
GridParams rescale_grid(GridParams g, double lambda_max);

struct SeriesEntry {
  cplx c;
  double phi;
  int jy;
  int jz;
};

struct ExpansionSeries {
  int k = 1;
  GridParams grid;
  double norm_const = 1.0;
  std::vector<SeriesEntry> entries;

  std::size_t l_k() const { return entries.size(); }
  double max_phase() const;  // largest |phi|
};

// Sum of coefficients per distinct phase; c = i * a with a real.
struct PhaseTerm {
  std::int64_t unit;  // jy * jz
  double phi;
  double a;
  double a_abs;  // sum of |a| over the merged entries
};

double normalization_constant(int k);

ExpansionSeries build_series(const GridParams& g);

// Merged nonzero terms, ascending in phase.
std::vector<PhaseTerm> compress(const ExpansionSeries& s);

// f(x) = sum_l c_l exp(-i phi_l x) for every x.
std::vector<cplx> series_response(const ExpansionSeries& s, std::span<const double> x);
cplx series_response(const ExpansionSeries& s, double x);

struct SeriesApplication {
  CVector state;  // unnormalized
  double norm = 0.0;
};

SeriesApplication apply_series(const ExpansionSeries& s, const HermitianOperator& op,
                               const StateVector& psi,
                               const EvolutionBackend& backend = ExactBackend{});

inline constexpr std::size_t kDefaultDenseCap = std::size_t{1} << 14;

CMatrix materialize_inverse(const ExpansionSeries& s, const HermitianOperator& op,
                            std::size_t dim_cap = kDefaultDenseCap);
CMatrix exact_inverse_power(const HermitianOperator& op, int k);

double trace_distance(const CMatrix& a, const CMatrix& b);

struct LedgerRow {
  double delta_phi;
  double p;
  double p_abs;
  std::int64_t unit;
};

struct PhaseLedger {
  int k = 0;
  double p_zero = 1.0;
  double p_zero_abs = 1.0;
  bool includes_zero_row = true;
  std::vector<LedgerRow> rows;  // delta_phi > 0, strictly increasing

  double max_delta_phi() const { return rows.empty() ? 0.0 : rows.back().delta_phi; }
};

// The k = 0 ledger: the zero row alone, so Eq.-6 style sums reduce to a
// Rayleigh quotient.
PhaseLedger identity_ledger();

PhaseLedger dedup_phases(const ExpansionSeries& s);

// (delta_phi, w) with the zero row first; weights sum to one.
std::vector<std::pair<double, double>> weight_histogram(const PhaseLedger& ledger);

GridParams suggest_grid(double kappa, double eps, int k);

}  // namespace invit
