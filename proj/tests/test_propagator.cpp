// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "invit/estimator.hpp"
#include "invit/inverse_series.hpp"
#include "invit/propagator.hpp"
#include "oracles.hpp"

using namespace invit;

namespace {

HermitianOperator h2s() { return shift(to_dense(build_h2()), 2.0); }
StateVector hf() { return StateVector::basis(16, spin_index("dduu")); }

StateVector random_state(std::size_t d, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  CVector v(d);
  for (auto& x : v) x = cplx(n(g), n(g));
  return StateVector::normalized(v);
}

TrotterBackend h2_trotter(int steps) {
  const auto op = h2s();
  return make_trotter(partition_commuting(build_h2()), steps, op);
}

}  // namespace

TEST(ExactEvolve, ZeroPhaseAndEigenvector) {
  const auto op = h2s();
  const auto psi = random_state(16, 1);
  EXPECT_LT((exact_evolve(op, 0.0, psi.amplitudes()) - psi.amplitudes()).norm(), 1e-15);
  const CVector v = op.eigenvectors().col(3);
  const double lam = op.eigenvalues()(3);
  const CVector out = exact_evolve(op, 0.8, v);
  EXPECT_LT((out - std::exp(cplx(0, -0.8 * lam)) * v).norm(), 1e-13);
}

TEST(ExactEvolve, MatchesMatrixExponentialOracle) {
  const auto op = to_dense(build_h2());
  const CMatrix u = oracle::expm(cplx(0, -0.5) * oracle::h2_kron());
  const CVector ref = u * hf().amplitudes();
  EXPECT_LT((exact_evolve(op, 0.5, hf().amplitudes()) - ref).norm(), 1e-10);
}

TEST(ExactEvolve, NormCompositionAndErrors) {
  const auto op = h2s();
  const auto psi = random_state(16, 2);
  const CVector a = exact_evolve(op, 1.3, psi.amplitudes());
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  const CVector b = exact_evolve(op, 0.4, exact_evolve(op, 0.9, psi.amplitudes()));
  EXPECT_LT((a - b).norm(), 1e-10);
  EXPECT_THROW(exact_evolve(op, 0.1, CVector::Ones(3)), DomainError);
}

TEST(ExactEvolve, TimeReversalConjugatesOverlap) {
  const auto op = h2s();
  for (unsigned s = 0; s < 5; ++s) {
    const auto psi = random_state(16, 10 + s);
    const cplx plus = psi.amplitudes().dot(exact_evolve(op, 0.7 + s, psi.amplitudes()));
    const cplx minus = psi.amplitudes().dot(exact_evolve(op, -0.7 - s, psi.amplitudes()));
    EXPECT_LT(std::abs(plus - std::conj(minus)), 1e-12);
  }
}

TEST(Partition, TrivialInputs) {
  EXPECT_EQ(partition_commuting(PauliSum(2, {make_term(1.0, "X0 Y1")})).size(), 1u);
  const PauliSum allz(3, {make_term(1, "Z0"), make_term(2, "Z1 Z2"), make_term(3, "Z0 Z2"),
                          make_term(-1, "I")});
  const auto g = partition_commuting(allz);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].terms().size(), 4u);
}

TEST(Partition, GroupsCoverAllTerms) {
  const PauliSum h(3, {make_term(1, "X0"), make_term(1, "Z0"), make_term(1, "Y0"),
                       make_term(0.5, "X1 X2"), make_term(0.5, "Z1 Z2")});
  const auto groups = partition_commuting(h);
  std::size_t total = 0;
  for (const auto& g : groups) {
    total += g.terms().size();
    for (const auto& a : g.terms())
      for (const auto& b : g.terms()) EXPECT_TRUE(commutes(a, b));
  }
  EXPECT_EQ(total, h.terms().size());
}

TEST(Trotter, SingleGroupEqualsExact) {
  const auto op = h2s();
  const auto psi = random_state(16, 3);
  for (int n : {1, 2, 7}) {
    const CVector t = trotter_evolve({op}, 1.7, n, psi.amplitudes());
    EXPECT_LT((t - exact_evolve(op, 1.7, psi.amplitudes())).norm(), 1e-12);
  }
}

TEST(Trotter, SecondOrderScaling) {
  const auto op = h2s();
  const auto t4 = h2_trotter(4), t8 = h2_trotter(8);
  const CVector ex = exact_evolve(op, 1.0, hf().amplitudes());
  const double e4 = (evolve(EvolutionBackend{t4}, op, 1.0, hf().amplitudes()) - ex).norm();
  const double e8 = (evolve(EvolutionBackend{t8}, op, 1.0, hf().amplitudes()) - ex).norm();
  EXPECT_NEAR(e4 / e8, 4.0, 1.0);
}

TEST(Trotter, ErrorDecreasesWithSteps) {
  const auto op = h2s();
  const auto psi = random_state(16, 4);
  const CVector ex = exact_evolve(op, 2.0, psi.amplitudes());
  double prev = 1e9;
  for (int n : {2, 4, 8, 16}) {
    const auto tb = h2_trotter(n);
    const double e = (trotter_evolve(tb.groups, 2.0, n, psi.amplitudes()) - ex).norm();
    EXPECT_LT(e, prev) << "n=" << n;
    prev = e;
  }
}

TEST(Trotter, UnitaryAndReversible) {
  const auto tb = h2_trotter(3);
  const auto psi = random_state(16, 5);
  const CVector f = trotter_evolve(tb.groups, 1.1, 3, psi.amplitudes());
  EXPECT_NEAR(f.norm(), 1.0, 1e-12);
  const CVector back = trotter_evolve(tb.groups, -1.1, 3, f);
  EXPECT_LT((back - psi.amplitudes()).norm(), 1e-12);
}

TEST(Trotter, RejectsGroupsThatDoNotSum) {
  const auto op = h2s();
  auto groups = partition_commuting(build_h2());
  groups.pop_back();
  EXPECT_THROW(make_trotter(groups, 4, op), ValidationError);
  EXPECT_THROW(make_trotter(partition_commuting(build_h2()), 0, op), ValidationError);
}

TEST(Trotter, EnergyEstimateCloseToExactBackend) {
  const auto op = h2s();
  const auto tb = h2_trotter(15);
  for (double pm : {0.3, 0.6, 0.95}) {
    const auto g = grid_from_phi_max(4, 30, 30, kTwoPi * pm, 1.0);
    const auto led = dedup_phases(build_series(g));
    const auto ex = estimate_energy(op, hf(), led, ExactOverlapProvider(op, hf()));
    const auto tr = estimate_energy(op, hf(), led, ExactOverlapProvider(op, hf(), tb));
    EXPECT_LT(std::abs(ex.lambda_est - tr.lambda_est), 1e-3) << "phi_max/2pi=" << pm;
  }
}
