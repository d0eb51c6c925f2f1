// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/inverse_series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "invit/kernels.hpp"

namespace invit {

void GridParams::validate() const {
  if (k < 1) throw ValidationError("grid k must be >= 1");
  if (m_y < 1 || m_z < 1) throw ValidationError("grid My and Mz must be >= 1");
  if (!(delta_y > 0.0) || !(delta_z > 0.0) || !std::isfinite(delta_y) ||
      !std::isfinite(delta_z))
    throw ValidationError("grid steps must be finite and > 0");
}

GridParams grid_from_phi_max(int k, int m_y, int m_z, double phi_max, double skew) {
  if (!(phi_max > 0.0) || !(skew > 0.0))
    throw ValidationError("phi_max and skew must be > 0");
  GridParams g{k, m_y, m_z, 0.0, 0.0};
  g.delta_z = std::sqrt(phi_max / (static_cast<double>(m_y) * m_z * skew));
  g.delta_y = skew * g.delta_z;
  g.validate();
  return g;
}

GridParams rescale_grid(GridParams g, double lambda_max) {
  if (!(lambda_max > 0.0)) throw DomainError("lambda_max must be > 0");
  g.delta_y /= lambda_max;
  return g;
}

double ExpansionSeries::max_phase() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, std::abs(e.phi));
  return m;
}

double normalization_constant(int k) {
  if (k < 1) throw DomainError("normalization constant needs k >= 1");
  return 1.0 / (std::pow(2.0, 0.5 * (k - 1)) * std::tgamma(0.5 * (k + 1)));
}

ExpansionSeries build_series(const GridParams& g) {
  g.validate();
  ExpansionSeries s;
  s.k = g.k;
  s.grid = g;
  s.norm_const = normalization_constant(g.k);
  const double pref = s.norm_const / std::sqrt(kTwoPi) * g.delta_y * g.delta_z;
  s.entries.reserve(static_cast<std::size_t>(g.m_y) * (2 * g.m_z + 1));
  for (int jy = 0; jy < g.m_y; ++jy) {
    const double y = jy * g.delta_y;
    const double ypow = g.k == 1 ? 1.0 : std::pow(y, g.k - 1);
    for (int jz = -g.m_z; jz <= g.m_z; ++jz) {
      const double z = jz * g.delta_z;
      const double a = pref * ypow * z * std::exp(-0.5 * z * z);
      s.entries.push_back({cplx(0.0, a), y * z, jy, jz});
    }
  }
  return s;
}

std::vector<PhaseTerm> compress(const ExpansionSeries& s) {
  std::map<std::int64_t, std::pair<double, double>> acc;
  for (const auto& e : s.entries) {
    const double a = e.c.imag();
    if (a == 0.0) continue;
    auto& slot = acc[static_cast<std::int64_t>(e.jy) * e.jz];
    slot.first += a;
    slot.second += std::abs(a);
  }
  const double unit = s.grid.delta_y * s.grid.delta_z;
  std::vector<PhaseTerm> out;
  out.reserve(acc.size());
  for (const auto& [u, v] : acc)
    out.push_back({u, static_cast<double>(u) * unit, v.first, v.second});
  return out;
}

std::vector<cplx> series_response(const ExpansionSeries& s, std::span<const double> x) {
  const auto terms = compress(s);
  std::vector<double> w(terms.size()), ph(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    w[i] = terms[i].a;
    ph[i] = terms[i].phi;
  }
  std::vector<double> re(x.size()), im(x.size());
  kernels::phase_sum(w, ph, x, re, im);
  // c = i a, so f = i (re + i im).
  std::vector<cplx> f(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) f[j] = cplx(-im[j], re[j]);
  return f;
}

cplx series_response(const ExpansionSeries& s, double x) {
  return series_response(s, std::span<const double>(&x, 1)).front();
}

SeriesApplication apply_series(const ExpansionSeries& s, const HermitianOperator& op,
                               const StateVector& psi, const EvolutionBackend& backend) {
  if (psi.dim() != op.dim()) throw DomainError("state/operator dimension mismatch");
  SeriesApplication r;
  if (std::holds_alternative<ExactBackend>(backend)) {
    const auto f = series_response(s, {op.eigenvalues().data(), op.dim()});
    CVector w = op.to_eigenbasis(psi.amplitudes());
    for (std::size_t j = 0; j < f.size(); ++j) w(j) *= f[j];
    r.state = op.from_eigenbasis(w);
  } else {
    r.state = CVector::Zero(op.dim());
    const std::size_t n = op.dim();
    for (const auto& t : compress(s)) {
      const CVector u = evolve(backend, op, t.phi, psi.amplitudes());
      kernels::caxpy(cplx(0.0, t.a), {u.data(), n}, {r.state.data(), n});
    }
  }
  r.norm = std::sqrt(kernels::norm2({r.state.data(), op.dim()}));
  return r;
}

CMatrix materialize_inverse(const ExpansionSeries& s, const HermitianOperator& op,
                            std::size_t dim_cap) {
  if (op.dim() > dim_cap)
    throw ResourceError("dimension " + std::to_string(op.dim()) + " over the dense cap");
  const auto f = series_response(s, {op.eigenvalues().data(), op.dim()});
  CVector fv(op.dim());
  for (std::size_t j = 0; j < f.size(); ++j) fv(j) = f[j];
  const CMatrix& v = op.eigenvectors();
  return v * fv.asDiagonal() * v.adjoint();
}

CMatrix exact_inverse_power(const HermitianOperator& op, int k) {
  if (!(op.min_eigenvalue() > 0.0))
    throw DomainError("inverse power needs a positive spectrum");
  const RVector d = op.eigenvalues().array().pow(-static_cast<double>(k));
  const CMatrix& v = op.eigenvectors();
  return v * d.cast<cplx>().asDiagonal() * v.adjoint();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DomainError("trace distance of matrices with unequal shapes");
  Eigen::BDCSVD<CMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

PhaseLedger identity_ledger() { return PhaseLedger{}; }

PhaseLedger dedup_phases(const ExpansionSeries& s) {
  const auto terms = compress(s);
  PhaseLedger led;
  led.k = s.k;
  led.p_zero = 0.0;
  led.p_zero_abs = 0.0;
  if (terms.empty()) return led;
  const std::int64_t umax = std::max(std::abs(terms.front().unit), std::abs(terms.back().unit));
  if (terms.size() > 40000)
    throw ResourceError("phase ledger over " + std::to_string(terms.size()) + " distinct phases");
  std::vector<double> p(2 * umax + 1, 0.0), pa(2 * umax + 1, 0.0);
  std::vector<char> seen(2 * umax + 1, 0);
  for (const auto& t1 : terms) {
    for (const auto& t2 : terms) {
      const std::int64_t d = std::abs(t1.unit - t2.unit);
      p[d] += t1.a * t2.a;
      pa[d] += t1.a_abs * t2.a_abs;
      seen[d] = 1;
    }
  }
  led.p_zero = p[0];
  led.p_zero_abs = pa[0];
  const double unit = s.grid.delta_y * s.grid.delta_z;
  for (std::int64_t d = 1; d <= 2 * umax; ++d)
    if (seen[d]) led.rows.push_back({static_cast<double>(d) * unit, p[d], pa[d], d});
  return led;
}

std::vector<std::pair<double, double>> weight_histogram(const PhaseLedger& ledger) {
  double total = ledger.p_zero_abs;
  for (const auto& r : ledger.rows) total += r.p_abs;
  std::vector<std::pair<double, double>> out;
  if (!(total > 0.0)) return out;
  out.emplace_back(0.0, ledger.p_zero_abs / total);
  for (const auto& r : ledger.rows) out.emplace_back(r.delta_phi, r.p_abs / total);
  return out;
}

GridParams suggest_grid(double kappa, double eps, int k) {
  if (!(kappa > 1.0)) throw DomainError("suggest_grid needs kappa > 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("suggest_grid needs 0 < eps < 1");
  if (k < 1) throw DomainError("suggest_grid needs k >= 1");
  const double l = std::log(kappa / eps);
  const double y_max = k * kappa * std::sqrt(2.0 * l);
  const double z_max = std::sqrt(2.0 * l);
  GridParams g;
  g.k = k;
  g.delta_y = eps / std::sqrt(l);
  g.m_y = static_cast<int>(std::ceil(y_max / g.delta_y));
  g.delta_z = kTwoPi / (y_max + 2.0 * z_max);
  g.m_z = static_cast<int>(std::ceil(z_max / g.delta_z));
  return g;
}

}  // namespace invit
