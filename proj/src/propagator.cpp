// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/propagator.hpp"

#include <algorithm>
#include <string>

#include "invit/kernels.hpp"

namespace invit {

namespace {

void check_dim(const HermitianOperator& op, Eigen::Index n) {
  if (static_cast<Eigen::Index>(op.dim()) != n)
    throw DomainError("state dimension " + std::to_string(n) +
                      " does not match operator dimension " + std::to_string(op.dim()));
}

// psi <- exp(-i phi H) psi via the cached eigenbasis.
void apply_exp(const HermitianOperator& op, double phi, CVector& psi) {
  CVector w = op.to_eigenbasis(psi);
  kernels::phase_rotate({w.data(), static_cast<std::size_t>(w.size())},
                        {op.eigenvalues().data(), op.dim()}, phi);
  psi = op.from_eigenbasis(w);
}

}  // namespace

std::vector<PauliSum> partition_commuting(const PauliSum& h) {
  std::vector<const PauliTerm*> order;
  for (const auto& t : h.terms()) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const PauliTerm* a, const PauliTerm* b) {
    if (a->x_mask() != b->x_mask()) return a->x_mask() < b->x_mask();
    return a->z_mask() < b->z_mask();
  });
  std::vector<std::vector<PauliTerm>> groups;
  for (const PauliTerm* t : order) {
    bool placed = false;
    for (auto& g : groups) {
      if (std::all_of(g.begin(), g.end(), [&](const PauliTerm& u) { return commutes(u, *t); })) {
        g.push_back(*t);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({*t});
  }
  std::vector<PauliSum> out;
  for (auto& g : groups) out.emplace_back(h.n_qubits(), std::move(g), h.energy_unit());
  return out;
}

TrotterBackend make_trotter(const std::vector<HermitianOperator>& groups,
                            int n_steps, const HermitianOperator& target) {
  if (n_steps < 1) throw ValidationError("Trotter n_steps must be >= 1");
  if (groups.empty()) throw ValidationError("Trotter backend needs at least one group");
  CMatrix sum = CMatrix::Zero(target.dim(), target.dim());
  for (const auto& g : groups) {
    if (g.dim() != target.dim()) throw ValidationError("Trotter group dimension mismatch");
    sum += g.matrix();
  }
  const double err = (sum - target.matrix()).norm();
  if (err > 1e-10 * std::max(1.0, target.matrix().norm()))
    throw ValidationError("Trotter groups do not sum to the Hamiltonian (residual " +
                          std::to_string(err) + ")");
  return TrotterBackend{n_steps, groups};
}

TrotterBackend make_trotter(const std::vector<PauliSum>& groups, int n_steps,
                            const HermitianOperator& target) {
  std::vector<HermitianOperator> dense;
  for (const auto& g : groups) dense.push_back(to_dense(g));
  if (!dense.empty() && target.shift_applied() != 0.0)
    dense.front() = shift(dense.front(), target.shift_applied());
  return make_trotter(dense, n_steps, target);
}

CVector exact_evolve(const HermitianOperator& op, double phi, const CVector& psi) {
  check_dim(op, psi.size());
  CVector out = psi;
  if (phi != 0.0) apply_exp(op, phi, out);
  return out;
}

StateVector exact_evolve(const HermitianOperator& op, double phi,
                         const StateVector& psi) {
  return StateVector::normalized(exact_evolve(op, phi, psi.amplitudes()));
}

CVector trotter_evolve(const std::vector<HermitianOperator>& groups, double phi,
                       int n_steps, const CVector& psi) {
  if (n_steps < 1) throw DomainError("Trotter n_steps must be >= 1");
  CVector out = psi;
  if (groups.empty() || phi == 0.0) return out;
  for (const auto& g : groups) check_dim(g, psi.size());
  const double tau = phi / (2.0 * n_steps);
  const std::size_t m = groups.size();
  for (int s = 0; s < n_steps; ++s) {
    for (std::size_t g = 0; g + 1 < m; ++g) apply_exp(groups[g], tau, out);
    apply_exp(groups[m - 1], 2.0 * tau, out);
    for (std::size_t g = m - 1; g-- > 0;) apply_exp(groups[g], tau, out);
  }
  return out;
}

StateVector trotter_evolve(const std::vector<HermitianOperator>& groups,
                           double phi, int n_steps, const StateVector& psi) {
  return StateVector::normalized(trotter_evolve(groups, phi, n_steps, psi.amplitudes()));
}

CVector evolve(const EvolutionBackend& backend, const HermitianOperator& op,
               double phi, const CVector& psi) {
  if (const auto* t = std::get_if<TrotterBackend>(&backend)) {
    check_dim(op, psi.size());
    return trotter_evolve(t->groups, phi, t->n_steps, psi);
  }
  return exact_evolve(op, phi, psi);
}

StateVector evolve(const EvolutionBackend& backend, const HermitianOperator& op,
                   double phi, const StateVector& psi) {
  return StateVector::normalized(evolve(backend, op, phi, psi.amplitudes()));
}

}  // namespace invit
