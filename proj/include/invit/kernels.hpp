// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops of the spectral evaluation path.  Every kernel
// has a scalar reference implementation; an AVX2/FMA variant is picked at
// runtime when the CPU supports it.  INVIT_SIMD=scalar|avx2 overrides.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace invit::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // s[i] = sin(x[i]), c[i] = cos(x[i]).
  void (*sincos)(const double* x, double* s, double* c, std::size_t n);

  // out[i] = sum_j w[j] exp(-i a[i] b[j]), split into re/im.
  void (*phase_sum)(const double* w, const double* b, std::size_t nb,
                    const double* a, std::size_t na, double* out_re,
                    double* out_im);

  // v[j] *= exp(-i phi x[j]).
  void (*phase_rotate)(std::complex<double>* v, const double* x, double phi,
                       std::size_t n);

  // sum_j conj(a[j]) b[j].
  std::complex<double> (*cdot)(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n);

  // y[j] += alpha x[j].
  void (*caxpy)(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n);

  double (*norm2)(const std::complex<double>* v, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

// Table in use by the library.  Chosen once from the environment and the CPU.
const KernelTable& active();
Backend active_backend();
std::string_view backend_name(Backend b);

// Forces a backend.  Returns false if it is unavailable on this machine.
bool set_backend(Backend b);

// Convenience wrappers over active().
void sincos(std::span<const double> x, std::span<double> s,
            std::span<double> c);
void phase_sum(std::span<const double> w, std::span<const double> b,
               std::span<const double> a, std::span<double> out_re,
               std::span<double> out_im);
void phase_rotate(std::span<std::complex<double>> v, std::span<const double> x,
                  double phi);
std::complex<double> cdot(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b);
void caxpy(std::complex<double> alpha,
           std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y);
double norm2(std::span<const std::complex<double>> v);

}  // namespace invit::kernels
