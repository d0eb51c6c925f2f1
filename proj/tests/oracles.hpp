// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations that avoid the library's own code paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// exp(A) by scaling and squaring with a Taylor series.
inline Mat expm(const Mat& a) {
  const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Mat b = a / std::pow(2.0, s);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// Pauli string by explicit Kronecker products; qubit 0 is the rightmost factor.
inline Mat pauli_kron(int n, const std::map<int, char>& ps) {
  Mat id = Mat::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cd(0, -1), cd(0, 1), 0;
  z << 1, 0, 0, -1;
  Mat m = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    const auto it = ps.find(q);
    const Mat& f = it == ps.end() ? id : it->second == 'X' ? x : it->second == 'Y' ? y : z;
    Mat k(m.rows() * 2, m.cols() * 2);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = m(i, j) * f;
    m = k;
  }
  return m;
}

inline Mat h2_kron() {
  const double xi[8] = {-0.098864, 0.171198, 0.222786, 0.168622,
                        0.120545,  0.165867, 0.174348, 0.045322};
  auto P = [](std::map<int, char> m) { return pauli_kron(4, m); };
  return xi[0] * P({}) + xi[1] * (P({{0, 'Z'}}) + P({{1, 'Z'}})) -
         xi[2] * (P({{2, 'Z'}}) + P({{3, 'Z'}})) + xi[3] * P({{0, 'Z'}, {1, 'Z'}}) +
         xi[4] * (P({{0, 'Z'}, {2, 'Z'}}) + P({{1, 'Z'}, {3, 'Z'}})) +
         xi[5] * (P({{0, 'Z'}, {3, 'Z'}}) + P({{1, 'Z'}, {2, 'Z'}})) +
         xi[6] * P({{2, 'Z'}, {3, 'Z'}}) -
         xi[7] * (P({{0, 'X'}, {1, 'X'}, {2, 'Y'}, {3, 'Y'}}) -
                  P({{0, 'X'}, {1, 'Y'}, {2, 'Y'}, {3, 'X'}}) -
                  P({{0, 'Y'}, {1, 'X'}, {2, 'X'}, {3, 'Y'}}) +
                  P({{0, 'Y'}, {1, 'Y'}, {2, 'X'}, {3, 'X'}}));
}

// All occupation tuples by odometer, filtered and sorted.
inline std::vector<std::vector<int>> fock_states(int n_sites, int n_max, int total /* -1: any */) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n_sites, 0);
  for (;;) {
    int s = 0;
    for (int v : cur) s += v;
    if (total < 0 || s == total) out.push_back(cur);
    int i = n_sites - 1;
    while (i >= 0 && cur[i] == n_max) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Lindblad evolution under dephasing L_q = sqrt(gamma) Z_q, RK4.
inline Mat lindblad_dephasing(const Mat& h, const Mat& rho0, double gamma, double t, int steps) {
  const int d = static_cast<int>(h.rows());
  int n = 0;
  while ((1 << n) < d) ++n;
  std::vector<Vec> zs;
  for (int q = 0; q < n; ++q) {
    Vec z(d);
    for (int b = 0; b < d; ++b) z(b) = ((b >> q) & 1) ? -1.0 : 1.0;
    zs.push_back(z);
  }
  auto rhs = [&](const Mat& r) {
    Mat out = cd(0, -1) * (h * r - r * h);
    for (const auto& z : zs) out += gamma * (z.asDiagonal() * r * z.asDiagonal() - r);
    return out;
  };
  Mat r = rho0;
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    const Mat k1 = rhs(r);
    const Mat k2 = rhs(r + 0.5 * dt * k1);
    const Mat k3 = rhs(r + 0.5 * dt * k2);
    const Mat k4 = rhs(r + dt * k3);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

// Distinct nonzero |phi_l - phi_l'| over all ordered pairs of the grid, from
// floating-point phases rounded in units of dy*dz.
inline std::set<long long> brute_force_phase_diffs(int my, int mz, double dy, double dz,
                                                   bool skip_zero_coeff, int k) {
  std::vector<double> phis;
  for (int jy = 0; jy < my; ++jy)
    for (int jz = -mz; jz <= mz; ++jz) {
      if (skip_zero_coeff && (jz == 0 || (k > 1 && jy == 0))) continue;
      phis.push_back((jy * dy) * (jz * dz));
    }
  std::set<long long> diffs;
  for (double a : phis)
    for (double b : phis) {
      const long long key = std::llround(std::abs(a - b) / (dy * dz) * 1e6);
      if (key != 0) diffs.insert(key);
    }
  return diffs;
}

}  // namespace oracle
