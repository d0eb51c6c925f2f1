// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <variant>
#include <vector>

#include "invit/core.hpp"
#include "invit/hermitian.hpp"
#include "invit/pauli.hpp"

namespace invit {

struct ExactBackend {};

// Symmetric second-order splitting over commuting groups.  Each group
// exponential is exact (own eigendecomposition).
struct TrotterBackend {
  int n_steps = 1;
  std::vector<HermitianOperator> groups;
};

using EvolutionBackend = std::variant<ExactBackend, TrotterBackend>;

// Greedy first-fit grouping of mutually commuting terms.  Diagonal terms are
// visited first, then the rest in canonical order.
std::vector<PauliSum> partition_commuting(const PauliSum& h);

// Dense groups for the backend.  `target` is the operator the groups must add
// up to; its accumulated shift is folded into the first group.  Throws
// ValidationError on mismatch.
TrotterBackend make_trotter(const std::vector<PauliSum>& groups, int n_steps,
                            const HermitianOperator& target);
TrotterBackend make_trotter(const std::vector<HermitianOperator>& groups,
                            int n_steps, const HermitianOperator& target);

CVector exact_evolve(const HermitianOperator& op, double phi, const CVector& psi);
StateVector exact_evolve(const HermitianOperator& op, double phi,
                         const StateVector& psi);

CVector trotter_evolve(const std::vector<HermitianOperator>& groups, double phi,
                       int n_steps, const CVector& psi);
StateVector trotter_evolve(const std::vector<HermitianOperator>& groups,
                           double phi, int n_steps, const StateVector& psi);

CVector evolve(const EvolutionBackend& backend, const HermitianOperator& op,
               double phi, const CVector& psi);
StateVector evolve(const EvolutionBackend& backend, const HermitianOperator& op,
                   double phi, const StateVector& psi);

}  // namespace invit
