// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "invit/core.hpp"
#include "invit/hermitian.hpp"

namespace invit {

using Occupation = std::vector<int>;

struct FockBasis {
  int n_sites = 0;
  int n_max = 0;
  std::optional<int> total_n;
  std::vector<Occupation> states;  // lexicographic
  std::map<Occupation, std::size_t> index;

  std::size_t dim() const { return states.size(); }
  std::optional<std::size_t> find(const Occupation& occ) const;
};

inline constexpr std::size_t kDefaultFockCap = 20000;

FockBasis build_fock_basis(int n_sites, int n_max,
                           std::optional<int> total_n = std::nullopt,
                           std::size_t cap = kDefaultFockCap);

enum class Boundary { Open, Periodic };

struct BoseHubbardParams {
  double J = 0.0;
  double U = 1.0;
  double mu = 0.0;
  double e0 = 0.0;
};

HermitianOperator build_bose_hubbard(const FockBasis& basis,
                                     const BoseHubbardParams& p,
                                     Boundary boundary = Boundary::Open);

// e0 that puts the smallest eigenvalue of h at +delta.
double positivity_shift(const HermitianOperator& h, double delta);

StateVector mott_state(const FockBasis& basis);

// Dense matrix of a^dag_{c+r} a_c.
CMatrix correlation_operator(const FockBasis& basis, int c, int r);
CMatrix number_operator(const FockBasis& basis, int site);
CMatrix total_number_operator(const FockBasis& basis);

}  // namespace invit
