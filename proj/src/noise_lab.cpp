// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/noise_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "invit/kernels.hpp"
#include "invit/parallel.hpp"

namespace invit {

void NoiseConfig::validate() const {
  if (!(gamma >= 0.0)) throw ValidationError("noise gamma must be >= 0");
  if (n_trajectories < 1) throw ValidationError("noise trajectories must be >= 1");
  for (std::size_t i = 0; i < gamma_sweep.size(); ++i) {
    if (!(gamma_sweep[i] >= 0.0)) throw ValidationError("gamma_sweep entries must be >= 0");
    if (i > 0 && !(gamma_sweep[i] > gamma_sweep[i - 1]))
      throw ValidationError("gamma_sweep must be strictly ascending");
  }
  if (!gamma_sweep.empty() && gamma_min > gamma_sweep.back())
    throw ValidationError("gamma_min lies above the whole sweep");
  for (int a : extrap_orders)
    if (a < 0) throw ValidationError("extrapolation orders must be >= 0");
  if (representative_order != 1 && representative_order != 3)
    throw ValidationError("representative_order must be 1 or 3");
}

std::vector<JumpEvent> draw_jumps(int n_qubits, double t, double gamma, std::uint64_t seed) {
  std::vector<JumpEvent> ev;
  if (!(gamma > 0.0) || !(t > 0.0)) return ev;
  for (int q = 0; q < n_qubits; ++q) {
    Stream s(derive_seed(seed, static_cast<std::uint64_t>(q)));
    double acc = 0.0;
    for (;;) {
      acc += s.exponential();
      const double time = acc / gamma;
      if (time > t) break;
      ev.push_back({time, q});
    }
  }
  std::sort(ev.begin(), ev.end(), [](const JumpEvent& a, const JumpEvent& b) {
    return a.time != b.time ? a.time < b.time : a.qubit < b.qubit;
  });
  return ev;
}

DephasingModel::DephasingModel(const HermitianOperator& op) : op_(op) {
  const std::size_t d = op.dim();
  if (!std::has_single_bit(d)) throw ValidationError("dephasing model needs a qubit operator (dim 2^n)");
  n_qubits_ = std::countr_zero(d);
  const CMatrix& v = op.eigenvectors();
  for (int q = 0; q < n_qubits_; ++q) {
    CVector z(d);
    for (std::size_t b = 0; b < d; ++b) z(b) = ((b >> q) & 1u) ? -1.0 : 1.0;
    z_eig_.push_back(v.adjoint() * z.asDiagonal() * v);
  }
}

CVector DephasingModel::evolve(const CVector& psi, double t,
                               const std::vector<JumpEvent>& jumps) const {
  CVector w = op_.to_eigenbasis(psi);
  const std::size_t n = op_.dim();
  const std::span<const double> ev(op_.eigenvalues().data(), n);
  double now = 0.0;
  for (const auto& j : jumps) {
    if (j.time > t) break;
    kernels::phase_rotate({w.data(), n}, ev, j.time - now);
    w = z_eig_[static_cast<std::size_t>(j.qubit)] * w;
    now = j.time;
  }
  kernels::phase_rotate({w.data(), n}, ev, t - now);
  CVector out = op_.from_eigenbasis(w);
  out /= out.norm();
  return out;
}

StateVector mc_trajectory(const HermitianOperator& op, const StateVector& psi, double phi,
                          double gamma, std::uint64_t seed) {
  if (!(phi >= 0.0)) throw DomainError("trajectory phase must be >= 0");
  const DephasingModel m(op);
  return StateVector::normalized(
      m.evolve(psi.amplitudes(), phi, draw_jumps(m.n_qubits(), phi, gamma, seed)));
}

namespace {

struct TrajSample {
  double p0, pp, pi;
};

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stderr_of(const std::vector<double>& x, double mean) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

NoisyProbabilities noisy_probabilities(const ProbeSet& probes, const DephasingModel& model,
                                       double t, double gamma, int n_traj,
                                       std::uint64_t master_seed) {
  if (!(t >= 0.0)) throw DomainError("trajectory phase must be >= 0");
  if (n_traj < 1) throw DomainError("n_traj must be >= 1");
  const CVector& tgt = probes.psi0.amplitudes();
  const CVector& plus = probes.psi_plus.amplitudes();
  const CVector& pi_probe = probes.psi_i.amplitudes();
  auto measure = [&](const std::vector<JumpEvent>& jumps) {
    const CVector s = model.evolve(probes.source.amplitudes(), t, jumps);
    const CVector sp = model.evolve(probes.source_plus.amplitudes(), t, jumps);
    return TrajSample{std::norm(tgt.dot(s)), std::norm(plus.dot(sp)), std::norm(pi_probe.dot(sp))};
  };
  const TrajSample quiet = measure({});
  std::vector<TrajSample> samples(static_cast<std::size_t>(n_traj));
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto jumps = draw_jumps(model.n_qubits(), t, gamma, derive_seed(master_seed, i));
    samples[i] = jumps.empty() ? quiet : measure(jumps);
  });

  const double th = probes.lambdaR * t;
  const double c = std::cos(th), sn = std::sin(th);
  const std::size_t n = samples.size();
  std::vector<double> p0(n), pp(n), pi(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    p0[i] = samples[i].p0;
    pp[i] = samples[i].pp;
    pi[i] = samples[i].pi;
    const double a = 2.0 * pp[i] - 0.5 * (p0[i] + 1.0);
    const double b = 2.0 * pi[i] - 0.5 * (p0[i] + 1.0);
    re[i] = a * c + b * sn;
    im[i] = b * c - a * sn;
  }
  NoisyProbabilities r;
  r.mean = {mean_of(p0), mean_of(pp), mean_of(pi), t};
  r.se_p0 = stderr_of(p0, r.mean.p0);
  r.se_pp = stderr_of(pp, r.mean.pp);
  r.se_pi = stderr_of(pi, r.mean.pi);
  const cplx d = infer_direct(r.mean, probes.lambdaR);
  const double scale = probes.source_scale;
  r.direct = scale * d;
  r.se_direct_re = scale * stderr_of(re, mean_of(re));
  r.se_direct_im = scale * stderr_of(im, mean_of(im));
  const double ind =
      infer_indirect(r.mean, d.imag(), d.real() < 0.0 ? -1 : 1, 3.0 * r.se_p0 + 1e-12,
                     &r.indirect_inconsistent);
  r.indirect = scale * ind;
  if (ind != 0.0) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = (p0[i] - 2.0 * d.imag() * im[i]) / (2.0 * ind);
    r.se_indirect = scale * std::abs(stderr_of(g, mean_of(g)));
  } else {
    r.se_indirect = scale * std::sqrt(r.se_p0);
  }
  return r;
}

FitResult extrapolate_fit(const std::vector<double>& gammas, const std::vector<double>& values,
                          const std::vector<double>& stderrs, int order) {
  if (order < 0) throw DomainError("extrapolation order must be >= 0");
  if (gammas.size() != values.size())
    throw DomainError("extrapolation needs one value per gamma");
  const std::size_t n = gammas.size();
  if (n < static_cast<std::size_t>(order) + 1)
    throw DomainError("extrapolation of order " + std::to_string(order) + " needs at least " +
                      std::to_string(order + 1) + " points, got " + std::to_string(n));
  double scale = 0.0;
  for (double g : gammas) scale = std::max(scale, std::abs(g));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd x(n, order + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = gammas[i] / scale;
    double p = 1.0;
    for (int a = 0; a <= order; ++a) {
      x(i, a) = p;
      p *= u;
    }
    y(i) = values[i];
  }
  const Eigen::MatrixXd pinv = x.completeOrthogonalDecomposition().pseudoInverse();
  FitResult f;
  f.intercept = pinv.row(0).dot(y);
  if (stderrs.size() == n) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += pinv(0, i) * pinv(0, i) * stderrs[i] * stderrs[i];
    f.std_err = std::sqrt(v);
  }
  return f;
}

double extrapolate(const std::vector<double>& gammas, const std::vector<double>& values, int order) {
  return extrapolate_fit(gammas, values, {}, order).intercept;
}

namespace {

double weighted(double dir_rep, double ind_rep, double dir1, double dir3, double ind1,
                double ind3) {
  const double w_dir = (ind1 - ind3) * (ind1 - ind3);
  const double w_ind = (dir1 - dir3) * (dir1 - dir3);
  if (w_dir + w_ind == 0.0) return 0.5 * (dir_rep + ind_rep);
  return (w_dir * dir_rep + w_ind * ind_rep) / (w_dir + w_ind);
}

}  // namespace

double weighted_mitigate(double dir1, double dir3, double ind1, double ind3) {
  return weighted(dir3, ind3, dir1, dir3, ind1, ind3);
}

MitigationRecord mitigate(double dphi, std::vector<SweepValue> direct,
                          std::vector<SweepValue> indirect, const NoiseConfig& cfg) {
  MitigationRecord r;
  r.dphi = dphi;
  r.values_direct = std::move(direct);
  r.values_indirect = std::move(indirect);
  const double tol = 1e-12 * std::max(1.0, cfg.gamma_min);
  auto fit = [&](const std::vector<SweepValue>& pts, int order) {
    std::vector<double> g, v, s;
    for (const auto& p : pts)
      if (p.gamma >= cfg.gamma_min - tol) {
        g.push_back(p.gamma);
        v.push_back(p.value);
        s.push_back(p.std_err);
      }
    return extrapolate_fit(g, v, s, order).intercept;
  };
  const int lo = cfg.extrap_orders.size() > 0 ? cfg.extrap_orders.front() : 1;
  const int hi = cfg.extrap_orders.size() > 1 ? cfg.extrap_orders.back() : 3;
  r.extrap_dir_1 = fit(r.values_direct, lo);
  r.extrap_dir_3 = fit(r.values_direct, hi);
  r.extrap_ind_1 = fit(r.values_indirect, lo);
  r.extrap_ind_3 = fit(r.values_indirect, hi);
  if (cfg.representative_order == 1)
    r.combined = weighted(r.extrap_dir_1, r.extrap_ind_1, r.extrap_dir_1, r.extrap_dir_3,
                          r.extrap_ind_1, r.extrap_ind_3);
  else
    r.combined = weighted_mitigate(r.extrap_dir_1, r.extrap_dir_3, r.extrap_ind_1, r.extrap_ind_3);
  // Unmitigated values at the lowest accessible rate.
  auto at_min = [&](const std::vector<SweepValue>& pts) {
    const SweepValue* best = nullptr;
    for (const auto& p : pts)
      if (p.gamma >= cfg.gamma_min - tol && (!best || p.gamma < best->gamma)) best = &p;
    return best ? best->value : 0.0;
  };
  r.at_gamma_min_direct = at_min(r.values_direct);
  r.at_gamma_min_indirect = at_min(r.values_indirect);
  return r;
}

MitigationTable run_mitigation(const HermitianOperator& op, const StateVector& psi0,
                               const StateVector& psiR, const std::vector<double>& dphis,
                               const NoiseConfig& cfg) {
  cfg.validate();
  const DephasingModel model(op);
  const ProbeSet pn = build_probes(op, psi0, psiR);
  const ProbeSet pe = build_energy_probes(op, psi0, psiR);
  MitigationTable table;
  for (double d : dphis) {
    const double t = std::abs(d);
    std::vector<SweepValue> nd, ni, ed, ei;
    for (double g : cfg.gamma_sweep) {
      const auto rn = noisy_probabilities(pn, model, t, g, cfg.n_trajectories, cfg.master_seed);
      const auto re = noisy_probabilities(pe, model, t, g, cfg.n_trajectories, cfg.master_seed);
      nd.push_back({g, rn.direct.real(), rn.se_direct_re});
      ni.push_back({g, rn.indirect, rn.se_indirect});
      ed.push_back({g, re.direct.real(), re.se_direct_re});
      ei.push_back({g, re.indirect, re.se_indirect});
    }
    table.norm.push_back(mitigate(t, std::move(nd), std::move(ni), cfg));
    table.energy.push_back(mitigate(t, std::move(ed), std::move(ei), cfg));
  }
  return table;
}

TabulatedOverlapProvider make_provider(const MitigationTable& table, MitigatedBranch branch) {
  std::vector<TabulatedOverlapProvider::Row> rows;
  auto pick = [&](const MitigationRecord& r) {
    switch (branch) {
      case MitigatedBranch::DirectAtGammaMin: return r.at_gamma_min_direct;
      case MitigatedBranch::IndirectAtGammaMin: return r.at_gamma_min_indirect;
      case MitigatedBranch::Combined: return r.combined;
    }
    return r.combined;
  };
  for (std::size_t i = 0; i < table.norm.size(); ++i)
    rows.push_back({table.norm[i].dphi, pick(table.norm[i]), pick(table.energy[i])});
  const char* label = branch == MitigatedBranch::DirectAtGammaMin     ? "noisy_direct"
                      : branch == MitigatedBranch::IndirectAtGammaMin ? "noisy_indirect"
                                                                      : "mitigated";
  return TabulatedOverlapProvider(std::move(rows), label);
}

}  // namespace invit
