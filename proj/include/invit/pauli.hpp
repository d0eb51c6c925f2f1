// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "invit/core.hpp"
#include "invit/hermitian.hpp"

namespace invit {

enum class PauliAxis : std::uint8_t { X, Y, Z };

struct PauliFactor {
  int qubit = 0;
  PauliAxis axis = PauliAxis::Z;
  auto operator<=>(const PauliFactor&) const = default;
};

struct PauliTerm {
  double coeff = 0.0;
  std::vector<PauliFactor> factors;  // sorted by qubit; empty = identity

  bool is_identity() const { return factors.empty(); }
  // Bit q set when factor on q is X or Y (resp. Z or Y).
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;
  bool is_diagonal() const { return x_mask() == 0; }
  std::string label() const;  // e.g. "X0 Y1 Z3", "I"

  bool operator==(const PauliTerm&) const = default;
};

bool commutes(const PauliTerm& a, const PauliTerm& b);

class PauliSum {
 public:
  PauliSum() = default;
  // Validates indices, sorts factors and terms, merges duplicate factor sets.
  PauliSum(int n_qubits, std::vector<PauliTerm> terms,
           std::string energy_unit = "J");

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const std::string& energy_unit() const { return unit_; }

  // Coefficient of the given factor set, 0 if absent.
  double coefficient(std::vector<PauliFactor> factors) const;

  bool operator==(const PauliSum&) const = default;

 private:
  int n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
  std::string unit_ = "J";
};

// Parses compact labels such as "X0 X1 Y2 Y3" or "I".
PauliTerm make_term(double coeff, std::string_view label);

// Built-in 4-qubit H2 Hamiltonian, unshifted.
PauliSum build_h2();

// Published average interaction constant of H2, quoted for gamma/xi ratios.
inline constexpr double kH2MeanCoupling = 0.1224;

PauliSum parse_pauli_sum(std::string_view json_text);
PauliSum load_pauli_sum(const std::filesystem::path& path);
std::string to_json(const PauliSum& h);

inline constexpr int kDefaultQubitCap = 14;
HermitianOperator to_dense(const PauliSum& h, int qubit_cap = kDefaultQubitCap);

// Computational basis index of a spin tuple written as a ket: the leftmost
// entry belongs to the highest qubit, down = 0, up = 1.  "ddUU" -> 3.
enum class Spin : std::uint8_t { Down, Up };
std::size_t spin_index(const std::vector<Spin>& ket);
std::size_t spin_index(std::string_view ket);  // chars 'd'/'u', case-insensitive

}  // namespace invit
