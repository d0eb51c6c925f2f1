// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "invit/pauli.hpp"
#include "invit/propagator.hpp"
#include "oracles.hpp"

using namespace invit;

namespace {

// Exact diagonalization of the Kronecker-built H2 (numpy and Eigen agree).
constexpr double kH2Ground = -1.137271590041;
constexpr double kH2Top = 0.920106;

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

std::filesystem::path beh2_path() {
  if (const char* e = std::getenv("INVIT_BEH2")) return e;
  return std::filesystem::path(INVIT_SOURCE_DIR) / "data" / "beh2.json";
}

}  // namespace

TEST(BuildH2, HasFifteenTermsAndPrintedCoefficients) {
  const PauliSum h = build_h2();
  EXPECT_EQ(h.n_qubits(), 4);
  EXPECT_EQ(h.terms().size(), 15u);
  EXPECT_DOUBLE_EQ(h.coefficient(make_term(0, "Z2 Z3").factors), 0.174348);
  EXPECT_DOUBLE_EQ(h.coefficient({}), -0.098864);
  EXPECT_DOUBLE_EQ(h.coefficient(make_term(0, "Y0 Y1 X2 X3").factors), -0.045322);
}

TEST(BuildH2, HartreeFockEnergy) {
  const auto op = to_dense(build_h2());
  const std::size_t hf = spin_index("dduu");
  EXPECT_EQ(hf, 3u);
  const auto psi = StateVector::basis(16, hf);
  EXPECT_NEAR(op.expectation(psi), -1.116684, 5e-6);
  EXPECT_NEAR(shift(op, 2.0).expectation(psi), 0.883316, 5e-6);
}

TEST(BuildH2, MatchesKroneckerOracle) {
  const auto op = to_dense(build_h2());
  EXPECT_LT((op.matrix() - oracle::h2_kron()).norm(), 1e-14);
  EXPECT_NEAR(op.min_eigenvalue(), kH2Ground, 1e-9);
  EXPECT_NEAR(op.max_eigenvalue(), kH2Top, 1e-9);
}

TEST(ToDense, SingleZ) {
  const auto op = to_dense(PauliSum(1, {make_term(1.0, "Z0")}));
  EXPECT_EQ(op.matrix(), (CMatrix(2, 2) << 1, 0, 0, -1).finished());
}

TEST(ToDense, XXAntiDiagonal) {
  const double xi = 0.37;
  const auto op = to_dense(PauliSum(2, {make_term(xi, "X0 X1")}));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_EQ(op.matrix()(i, j), (i + j == 3) ? cplx(xi) : cplx(0.0));
}

TEST(ToDense, OverCapIsResourceError) {
  EXPECT_THROW(to_dense(PauliSum(15, {make_term(1.0, "Z14")})), ResourceError);
  EXPECT_THROW(to_dense(PauliSum(3, {make_term(1.0, "Z0")}), 2), ResourceError);
}

TEST(ToDense, RandomSumsAreHermitianAndMatchKronecker) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> c(-1, 1);
  std::uniform_int_distribution<int> ax(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3;
    std::vector<PauliTerm> terms;
    CMatrix ref = CMatrix::Zero(8, 8);
    for (int t = 0; t < 6; ++t) {
      PauliTerm term{c(g), {}};
      std::map<int, char> m;
      for (int q = 0; q < n; ++q) {
        const int a = ax(g);
        if (a == 0) continue;
        term.factors.push_back({q, static_cast<PauliAxis>(a - 1)});
        m[q] = "XYZ"[a - 1];
      }
      ref += term.coeff * oracle::pauli_kron(n, m);
      terms.push_back(term);
    }
    const auto op = to_dense(PauliSum(n, terms));
    const CMatrix& m = op.matrix();
    EXPECT_LT((m - m.adjoint()).norm(), 1e-12 * std::max(1.0, m.norm()));
    EXPECT_LT((m - ref).norm(), 1e-13);
    const CMatrix rec = op.eigenvectors() * op.eigenvalues().cast<cplx>().asDiagonal() *
                        op.eigenvectors().adjoint();
    EXPECT_LT((rec - m).norm(), 1e-10 * std::max(1.0, m.norm()));
    for (Eigen::Index i = 1; i < op.eigenvalues().size(); ++i)
      EXPECT_LE(op.eigenvalues()(i - 1), op.eigenvalues()(i));
  }
}

TEST(HermitianOperator, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(HermitianOperator{m}, ValidationError);
}

TEST(Shift, ZeroIsIdentityAndEigenvectorsUnchanged) {
  const auto op = to_dense(build_h2());
  const auto s0 = shift(op, 0.0);
  EXPECT_EQ(s0.matrix(), op.matrix());
  EXPECT_EQ(s0.eigenvalues(), op.eigenvalues());
  const auto s2 = shift(op, 2.0);
  EXPECT_EQ(s2.eigenvectors(), op.eigenvectors());
  EXPECT_DOUBLE_EQ(s2.shift_applied(), 2.0);
  EXPECT_GT(s2.min_eigenvalue(), 0.0);
}

TEST(Shift, ComposesExactly) {
  const auto op = to_dense(build_h2());
  for (auto [a, b] : {std::pair{0.1, 0.2}, {2.0, -0.7}, {1e-3, 3.3}}) {
    const auto ab = shift(shift(op, a), b);
    const auto direct = shift(op, a + b);
    EXPECT_EQ(ab.eigenvalues(), direct.eigenvalues());
  }
}

TEST(ConditionNumber, IdentityAndShiftedH2) {
  EXPECT_DOUBLE_EQ(condition_number(HermitianOperator(CMatrix::Identity(3, 3))), 1.0);
  const auto op = shift(to_dense(build_h2()), 2.0);
  const double kappa = condition_number(op);
  EXPECT_NEAR(kappa, 3.38, 0.02 * 3.38);
  EXPECT_NEAR(kappa, (kH2Top + 2) / (kH2Ground + 2), 1e-8);
  EXPECT_THROW(condition_number(to_dense(build_h2())), DomainError);
}

TEST(Commutation, H2SplitsIntoDiagonalAndFourBodyGroups) {
  const PauliSum h = build_h2();
  const auto groups = partition_commuting(h);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].terms().size(), 11u);
  EXPECT_EQ(groups[1].terms().size(), 4u);
  for (const auto& t : groups[0].terms()) EXPECT_TRUE(t.is_diagonal());
  for (const auto& t : groups[1].terms()) EXPECT_EQ(t.factors.size(), 4u);
  // Matrix-level commutators inside each group vanish.
  for (const auto& g : groups)
    for (const auto& a : g.terms())
      for (const auto& b : g.terms()) {
        const auto ma = to_dense(PauliSum(4, {a})).matrix();
        const auto mb = to_dense(PauliSum(4, {b})).matrix();
        EXPECT_LT((ma * mb - mb * ma).norm(), 1e-14) << a.label() << " / " << b.label();
      }
  // Maximality: every cross pair has a non-commuting partner.
  for (const auto& s : groups[1].terms()) {
    bool clash = false;
    for (const auto& t : groups[0].terms()) clash |= !commutes(s, t);
    EXPECT_TRUE(clash);
  }
}

TEST(Commutation, HartreeFockIsEigenvectorOfDiagonalGroup) {
  const auto groups = partition_commuting(build_h2());
  const auto g = to_dense(groups[0]);
  const CVector hf = StateVector::basis(16, spin_index("dduu")).amplitudes();
  const CVector h = g.matrix() * hf;
  const cplx lam = hf.dot(h);
  EXPECT_LT((h - lam * hf).norm(), 1e-14);
}

TEST(LoadPauliSum, SingleTerm) {
  const auto p = write_temp("invit_one.json",
                            R"({"n_qubits":1,"energy_unit":"J","terms":[{"coeff":1.0,"paulis":[{"q":0,"axis":"Z"}]}]})");
  const auto h = load_pauli_sum(p);
  EXPECT_EQ(h.n_qubits(), 1);
  ASSERT_EQ(h.terms().size(), 1u);
  EXPECT_EQ(h.terms()[0].label(), "Z0");
}

TEST(LoadPauliSum, MergesDuplicates) {
  const auto h = parse_pauli_sum(
      R"({"n_qubits":2,"energy_unit":"Hartree","terms":[
          {"coeff":0.25,"paulis":[{"q":1,"axis":"X"},{"q":0,"axis":"Z"}]},
          {"coeff":0.5,"paulis":[{"q":0,"axis":"Z"},{"q":1,"axis":"X"}]},
          {"coeff":-1.0,"paulis":[]}]})");
  ASSERT_EQ(h.terms().size(), 2u);
  EXPECT_DOUBLE_EQ(h.coefficient(make_term(0, "Z0 X1").factors), 0.75);
  EXPECT_EQ(h.energy_unit(), "Hartree");
}

TEST(LoadPauliSum, Errors) {
  EXPECT_THROW(parse_pauli_sum("{\"n_qubits\": 1, \"terms\": ["), ParseError);
  EXPECT_THROW(parse_pauli_sum(R"({"n_qubits":1,"terms":[{"coeff":1,"paulis":[{"q":1,"axis":"Z"}]}]})"),
               ValidationError);
  EXPECT_THROW(parse_pauli_sum(R"({"n_qubits":1,"terms":[{"coeff":[1,2],"paulis":[]}]})"),
               ValidationError);
  EXPECT_THROW(parse_pauli_sum(R"({"n_qubits":1,"terms":[{"coeff":"1+2j","paulis":[]}]})"),
               ValidationError);
  EXPECT_THROW(parse_pauli_sum(R"({"n_qubits":1,"terms":[{"coeff":1,"paulis":[{"q":0,"axis":"W"}]}]})"),
               ValidationError);
  EXPECT_THROW(load_pauli_sum("/nonexistent/invit.json"), ValidationError);
}

TEST(LoadPauliSum, JsonRoundTrip) {
  const PauliSum h = build_h2();
  EXPECT_EQ(parse_pauli_sum(to_json(h)), h);
}

TEST(SpinIndex, KetOrdering) {
  EXPECT_EQ(spin_index("dddd"), 0u);
  EXPECT_EQ(spin_index("uddd"), 8u);
  EXPECT_EQ(spin_index("dduuuuuu"), 0b00111111u);
  EXPECT_THROW(spin_index("dx"), DomainError);
}

TEST(BeH2, GroundEnergyAndConditionNumberFromDataFile) {
  const auto p = beh2_path();
  if (!std::filesystem::exists(p)) GTEST_SKIP() << "BeH2 data file not present at " << p;
  const auto op = to_dense(load_pauli_sum(p));
  EXPECT_NEAR(op.min_eigenvalue(), -1.806750, 1e-5);
  EXPECT_NEAR(condition_number(shift(op, 2.0)), 39.2, 0.05 * 39.2);
}
