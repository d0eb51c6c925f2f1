// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/boson.hpp"

#include <cmath>
#include <string>

namespace invit {

std::optional<std::size_t> FockBasis::find(const Occupation& occ) const {
  auto it = index.find(occ);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

namespace {

void enumerate(FockBasis& b, Occupation& cur, int site, int remaining,
               std::size_t cap) {
  if (site == b.n_sites) {
    if (b.total_n && remaining != 0) return;
    if (b.states.size() >= cap)
      throw ResourceError("Fock basis exceeds the cap of " + std::to_string(cap) + " states");
    b.states.push_back(cur);
    return;
  }
  int hi = b.n_max;
  if (b.total_n) {
    hi = std::min(hi, remaining);
    // The trailing sites can hold at most n_max each.
    const int rest = (b.n_sites - site - 1) * b.n_max;
    for (int n = std::max(0, remaining - rest); n <= hi; ++n) {
      cur[site] = n;
      enumerate(b, cur, site + 1, remaining - n, cap);
    }
    return;
  }
  for (int n = 0; n <= hi; ++n) {
    cur[site] = n;
    enumerate(b, cur, site + 1, remaining, cap);
  }
}

std::vector<std::pair<int, int>> bonds(int n_sites, Boundary boundary) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i + 1 < n_sites; ++i) out.emplace_back(i, i + 1);
  if (boundary == Boundary::Periodic && n_sites > 2) out.emplace_back(n_sites - 1, 0);
  return out;
}

// Adds coeff * a^dag_to a_from to m.
void add_hop(const FockBasis& basis, CMatrix& m, int to, int from, double coeff) {
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Occupation& occ = basis.states[s];
    if (occ[from] == 0) continue;
    if (to == from) {
      m(s, s) += coeff * occ[from];
      continue;
    }
    if (occ[to] >= basis.n_max) continue;
    Occupation t = occ;
    const double amp = std::sqrt(static_cast<double>(occ[from]) * (occ[to] + 1));
    t[from] -= 1;
    t[to] += 1;
    if (auto j = basis.find(t)) m(*j, s) += coeff * amp;
  }
}

}  // namespace

FockBasis build_fock_basis(int n_sites, int n_max, std::optional<int> total_n,
                           std::size_t cap) {
  if (n_sites < 1) throw DomainError("n_sites must be >= 1");
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  if (total_n && *total_n < 0) throw DomainError("total_n must be >= 0");
  FockBasis b;
  b.n_sites = n_sites;
  b.n_max = n_max;
  b.total_n = total_n;
  Occupation cur(static_cast<std::size_t>(n_sites), 0);
  enumerate(b, cur, 0, total_n.value_or(0), cap);
  for (std::size_t i = 0; i < b.states.size(); ++i) b.index.emplace(b.states[i], i);
  return b;
}

HermitianOperator build_bose_hubbard(const FockBasis& basis,
                                     const BoseHubbardParams& p,
                                     Boundary boundary) {
  if (!(p.U > 0.0)) throw ValidationError("Bose-Hubbard U must be > 0");
  if (!(p.J >= 0.0)) throw ValidationError("Bose-Hubbard J must be >= 0");
  if (basis.dim() == 0) throw DomainError("empty Fock basis");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    double d = p.e0;
    for (int ni : basis.states[s]) d += 0.5 * p.U * ni * (ni - 1) - p.mu * ni;
    m(s, s) = d;
  }
  if (p.J != 0.0) {
    for (auto [i, j] : bonds(basis.n_sites, boundary)) {
      add_hop(basis, m, i, j, -p.J);
      add_hop(basis, m, j, i, -p.J);
    }
  }
  return HermitianOperator(m);
}

double positivity_shift(const HermitianOperator& h, double delta) {
  return -h.min_eigenvalue() + delta;
}

StateVector mott_state(const FockBasis& basis) {
  const Occupation ones(static_cast<std::size_t>(basis.n_sites), 1);
  auto idx = basis.find(ones);
  if (!idx) throw DomainError("Mott occupation (1,...,1) is not in the basis");
  return StateVector::basis(basis.dim(), *idx);
}

CMatrix correlation_operator(const FockBasis& basis, int c, int r) {
  if (c < 0 || c >= basis.n_sites || c + r < 0 || c + r >= basis.n_sites)
    throw DomainError("correlation sites (" + std::to_string(c) + ", " +
                      std::to_string(c + r) + ") outside the chain");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Zero(n, n);
  add_hop(basis, m, c + r, c, 1.0);
  return m;
}

CMatrix number_operator(const FockBasis& basis, int site) {
  return correlation_operator(basis, site, 0);
}

CMatrix total_number_operator(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    int tot = 0;
    for (int ni : basis.states[s]) tot += ni;
    m(s, s) = tot;
  }
  return m;
}

}  // namespace invit
