// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "invit/kernels.hpp"

namespace invit::kernels {

#ifdef INVIT_HAVE_AVX2
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#ifdef INVIT_HAVE_AVX2
  return &avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(INVIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  const bool avx2_ok = avx2_table() != nullptr && cpu_has_avx2();
  if (const char* env = std::getenv("INVIT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && avx2_ok) return Backend::Avx2;
  }
  return avx2_ok ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

const KernelTable& active() {
  return current().load(std::memory_order_relaxed) == Backend::Avx2
             ? *avx2_table()
             : scalar_table();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool set_backend(Backend b) {
  if (b == Backend::Avx2 && (avx2_table() == nullptr || !cpu_has_avx2()))
    return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

void sincos(std::span<const double> x, std::span<double> s,
            std::span<double> c) {
  active().sincos(x.data(), s.data(), c.data(), x.size());
}

void phase_sum(std::span<const double> w, std::span<const double> b,
               std::span<const double> a, std::span<double> out_re,
               std::span<double> out_im) {
  active().phase_sum(w.data(), b.data(), b.size(), a.data(), a.size(),
                     out_re.data(), out_im.data());
}

void phase_rotate(std::span<std::complex<double>> v, std::span<const double> x,
                  double phi) {
  active().phase_rotate(v.data(), x.data(), phi, v.size());
}

std::complex<double> cdot(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  return active().cdot(a.data(), b.data(), a.size());
}

void caxpy(std::complex<double> alpha,
           std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y) {
  active().caxpy(alpha, x.data(), y.data(), x.size());
}

double norm2(std::span<const std::complex<double>> v) {
  return active().norm2(v.data(), v.size());
}

}  // namespace invit::kernels
