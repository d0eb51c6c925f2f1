// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "invit/estimator.hpp"
#include "invit/inverse_series.hpp"
#include "invit/pauli.hpp"
#include "oracles.hpp"

using namespace invit;

namespace {

// x^{-k} * sqrt(2 pi) / I_k(x) where I_k is the double integral of the
// Fourier representation, by nested adaptive Gauss-Kronrod quadrature.
double quadrature_norm_const(int k, double x) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double y) {
    auto f = [&](double z) { return z * std::exp(-0.5 * z * z) * std::sin(y * z * x); };
    return std::pow(y, k - 1) * gauss_kronrod<double, 61>::integrate(f, -12.0, 12.0, 12, 1e-13);
  };
  // The z integral decays like exp(-(y x)^2 / 2); nothing survives past y x = 12.
  const double integral = gauss_kronrod<double, 61>::integrate(inner, 0.0, 12.0 / x, 12, 1e-12);
  return std::pow(x, -k) * std::sqrt(kTwoPi) / integral;
}

HermitianOperator h2s() { return shift(to_dense(build_h2()), 2.0); }
StateVector hf() { return StateVector::basis(16, spin_index("dduu")); }

StateVector random_state(std::size_t d, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  CVector v(d);
  for (auto& x : v) x = cplx(n(g), n(g));
  return StateVector::normalized(v);
}

GridParams generous(int k) { return {k, 60, 60, 0.1, 0.1}; }

}  // namespace

TEST(NormalizationConstant, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(normalization_constant(1), 1.0);
  EXPECT_NEAR(normalization_constant(2), std::sqrt(2.0 / kPi), 1e-15);
  EXPECT_NEAR(normalization_constant(3), 0.5, 1e-15);
  EXPECT_THROW(normalization_constant(0), DomainError);
}

TEST(NormalizationConstant, AgreesWithQuadratureOracle) {
  for (int k = 1; k <= 4; ++k)
    for (double x : {1.0, 2.0}) {
      EXPECT_NEAR(quadrature_norm_const(k, x), normalization_constant(k),
                  1e-7 * normalization_constant(k))
          << "k=" << k << " x=" << x;
    }
}

TEST(BuildSeries, StructureOfEntries) {
  for (int k = 1; k <= 3; ++k) {
    const GridParams g{k, 7, 4, 0.3, 0.45};
    const auto s = build_series(g);
    EXPECT_EQ(s.l_k(), 7u * 9u);
    for (const auto& e : s.entries) {
      EXPECT_EQ(e.c.real(), 0.0);
      if (e.jz == 0) EXPECT_EQ(e.c, cplx(0.0));
      EXPECT_DOUBLE_EQ(e.phi, (e.jy * 0.3) * (e.jz * 0.45));
    }
  }
  const auto s1 = build_series({1, 5, 3, 0.2, 0.2});
  for (const auto& e : s1.entries)
    for (const auto& f : s1.entries)
      if (e.jz == f.jz) EXPECT_DOUBLE_EQ(std::abs(e.c), std::abs(f.c));
}

TEST(BuildSeries, ScalarInverseAtOne) {
  EXPECT_NEAR(series_response(build_series(generous(1)), 1.0).real(), 1.0, 1e-2);
}

TEST(BuildSeries, ConvergesToScalarInversePowers) {
  // A long y range resolves the x = 0.5 tail; the finer y step keeps the
  // k = 1 left-endpoint error (x dy)^2 / 12 small.
  for (int k = 1; k <= 4; ++k) {
    const auto s = build_series({k, 400, 80, 0.05, 0.1});
    for (double x : {0.5, 1.0, 2.0}) {
      const cplx f = series_response(s, x);
      EXPECT_NEAR(f.real() * std::pow(x, k), 1.0, 1e-3) << "k=" << k << " x=" << x;
      EXPECT_LT(std::abs(f.imag()), 1e-11);
    }
  }
}

TEST(ApplySeries, IdentityOperator) {
  const HermitianOperator id(CMatrix::Identity(4, 4));
  const auto psi = random_state(4, 1);
  const auto r = apply_series(build_series(generous(1)), id, psi);
  EXPECT_LT((r.state - psi.amplitudes()).norm(), 1e-2);
  EXPECT_NEAR(r.norm, r.state.norm(), 1e-14);
}

TEST(ApplySeries, EigenstateScalesByInversePower) {
  const auto op = h2s();
  for (int k = 1; k <= 3; ++k) {
    const auto s = build_series({k, 200, 80, 0.1, 0.1});
    const CVector v = op.eigenvectors().col(5);
    const double lam = op.eigenvalues()(5);
    const auto r = apply_series(s, op, StateVector::normalized(v));
    EXPECT_LT((r.state - std::pow(lam, -k) * v).norm(), 2e-3 * std::pow(lam, -k));
  }
}

TEST(ApplySeries, ZeroEntrySeries) {
  const auto r = apply_series(build_series({2, 1, 5, 0.3, 0.3}), h2s(), hf());
  EXPECT_EQ(r.norm, 0.0);
}

TEST(ApplySeries, ExactEqualsMaterializedAndTrotterSingleGroup) {
  const auto op = h2s();
  const auto s = build_series(grid_from_phi_max(3, 12, 9, kTwoPi * 0.8, 1.5));
  const auto psi = random_state(16, 9);
  const auto r = apply_series(s, op, psi);
  const CVector m = materialize_inverse(s, op) * psi.amplitudes();
  EXPECT_LT((r.state - m).norm(), 1e-10);
  const auto t = apply_series(s, op, psi, TrotterBackend{3, {op}});
  EXPECT_LT((t.state - r.state).norm(), 1e-10);
}

TEST(MaterializeInverse, IdentityAndCap) {
  const HermitianOperator id(CMatrix::Identity(3, 3));
  const CMatrix m = materialize_inverse(build_series(generous(1)), id);
  EXPECT_LT((m - CMatrix::Identity(3, 3)).norm(), 1e-2);
  EXPECT_THROW(materialize_inverse(build_series(generous(1)), id, 2), ResourceError);
}

TEST(TraceDistance, BasicValues) {
  const CMatrix a = CMatrix::Random(5, 5);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
  CMatrix p = CMatrix::Zero(2, 2), q = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  q(1, 1) = 1.0;
  EXPECT_NEAR(trace_distance(p, q), 1.0, 1e-14);
  EXPECT_THROW(trace_distance(p, CMatrix::Zero(3, 3)), DomainError);
}

TEST(TraceDistance, H2ImprovesWithPhiMax) {
  const auto op = h2s();
  const CMatrix exact = exact_inverse_power(op, 4);
  double prev = 1e9;
  for (double pm : {0.3, 0.35, 0.6, 0.95, 1.35}) {
    const auto s = build_series(grid_from_phi_max(4, 30, 30, kTwoPi * pm, 1.0));
    const double d = trace_distance(materialize_inverse(s, op), exact);
    EXPECT_LT(d, prev) << "phi_max/2pi=" << pm;
    prev = d;
  }
}

TEST(DedupPhases, SupplementGridHas35Differences) {
  const auto s = build_series({1, 5, 5, 0.5, 0.5});
  const auto led = dedup_phases(s);
  EXPECT_EQ(led.rows.size(), 35u);
  EXPECT_EQ(oracle::brute_force_phase_diffs(5, 5, 0.5, 0.5, true, 1).size(), 35u);
  EXPECT_EQ(oracle::brute_force_phase_diffs(5, 5, 0.5, 0.5, false, 1).size(), 35u);
  for (std::size_t i = 1; i < led.rows.size(); ++i)
    EXPECT_GT(led.rows[i].delta_phi, led.rows[i - 1].delta_phi);
  EXPECT_NEAR(led.max_delta_phi(), 2.0 * s.max_phase(), 1e-12);
}

TEST(DedupPhases, SmallGridMatchesBruteForce) {
  for (int k = 1; k <= 3; ++k) {
    const auto led = dedup_phases(build_series({k, 2, 2, 0.5, 0.5}));
    const auto bf = oracle::brute_force_phase_diffs(2, 2, 0.5, 0.5, true, k);
    ASSERT_EQ(led.rows.size(), bf.size()) << "k=" << k;
    std::size_t i = 0;
    for (long long key : bf) EXPECT_NEAR(led.rows[i++].delta_phi / 0.25 * 1e6, key, 1e-3);
  }
}

TEST(DedupPhases, SingleEntrySeries) {
  ExpansionSeries s;
  s.k = 1;
  s.grid = {1, 1, 1, 0.5, 0.5};
  s.entries.push_back({cplx(0, 0.3), 0.25, 1, 1});
  const auto led = dedup_phases(s);
  EXPECT_TRUE(led.rows.empty());
  EXPECT_NEAR(led.p_zero, 0.09, 1e-15);
}

TEST(DedupPhases, LedgerReproducesDoubleSum) {
  const auto op = h2s();
  for (int k : {1, 2, 4}) {
    const auto s = build_series(grid_from_phi_max(k, 6, 5, kTwoPi * 0.9, 1.3));
    const auto led = dedup_phases(s);
    for (unsigned seed = 0; seed < 4; ++seed) {
      const auto psi = random_state(16, 40 + seed);
      const ExactOverlapProvider prov(op, psi);
      // Brute force: sum over all ordered pairs of conj(c_l') c_l <psi|U(phi_l - phi_l')|psi>.
      cplx den = 0, num = 0;
      for (const auto& a : s.entries)
        for (const auto& b : s.entries) {
          const double d = a.phi - b.phi;
          const CVector u = exact_evolve(op, d, psi.amplitudes());
          const cplx w = std::conj(b.c) * a.c;
          den += w * psi.amplitudes().dot(u);
          num += w * psi.amplitudes().dot(op.matrix() * u);
        }
      const auto rep = estimate_energy(op, psi, led, prov);
      EXPECT_NEAR(rep.norm_value, den.real(), 1e-12 * std::abs(den));
      EXPECT_NEAR(rep.numerator, num.real(), 1e-12 * std::abs(num));
      EXPECT_LT(std::abs(den.imag()), 1e-12 * std::abs(den));
    }
  }
}

TEST(WeightHistogram, NormalizedAndShiftsWithK) {
  auto mean_of = [](const std::vector<std::pair<double, double>>& h) {
    double m = 0;
    for (auto [d, w] : h) m += d * w;
    return m;
  };
  std::vector<double> means;
  for (int k = 1; k <= 3; ++k) {
    const auto h = weight_histogram(dedup_phases(build_series({k, 5, 5, 0.5, 0.5})));
    double sum = 0;
    for (auto [d, w] : h) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    means.push_back(mean_of(h));
    if (k == 1) {
      const auto top = std::max_element(h.begin(), h.end(),
                                        [](auto& a, auto& b) { return a.second < b.second; });
      EXPECT_LT(top->first / kTwoPi, 0.5);
    }
  }
  EXPECT_LT(means[0], means[2]);
}

TEST(SuggestGrid, DefinitionsAndMonotonicity) {
  const auto g = suggest_grid(3.38, 1.6e-3, 1);
  EXPECT_DOUBLE_EQ(g.phi_max(), (g.m_y * g.delta_y) * (g.m_z * g.delta_z));
  for (double eps : {1e-2, 1e-3}) {
    const auto a = suggest_grid(5.0, eps, 2), b = suggest_grid(10.0, eps, 2);
    EXPECT_GE(b.m_y, a.m_y);
    EXPECT_GE(b.m_z, a.m_z);
    EXPECT_GE(b.phi_max(), a.phi_max());
  }
  EXPECT_THROW(suggest_grid(1.0, 1e-3, 1), DomainError);
  EXPECT_THROW(suggest_grid(3.0, 1.5, 1), DomainError);
}

TEST(SuggestGrid, ReproducesInverseOnH2Spectrum) {
  const auto op = h2s();
  const double kappa = condition_number(op);
  const auto g = rescale_grid(suggest_grid(kappa, 1.6e-3, 1), op.max_eigenvalue());
  const auto s = build_series(g);
  const auto f = series_response(s, {op.eigenvalues().data(), op.dim()});
  for (std::size_t j = 0; j < op.dim(); ++j) {
    const double lam = op.eigenvalues()(j);
    EXPECT_LT(std::abs(f[j].real() * lam - 1.0), 5e-3) << "lambda=" << lam;
  }
}
