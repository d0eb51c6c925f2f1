// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "invit/kernels.hpp"

namespace invit::kernels {
namespace {

using cd = std::complex<double>;

void sincos_ref(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void phase_sum_ref(const double* w, const double* b, std::size_t nb,
                   const double* a, std::size_t na, double* out_re,
                   double* out_im) {
  for (std::size_t i = 0; i < na; ++i) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double t = a[i] * b[j];
      re += w[j] * std::cos(t);
      im -= w[j] * std::sin(t);
    }
    out_re[i] = re;
    out_im[i] = im;
  }
}

void phase_rotate_ref(cd* v, const double* x, double phi, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double t = phi * x[j];
    v[j] *= cd(std::cos(t), -std::sin(t));
  }
}

cd cdot_ref(const cd* a, const cd* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    re += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
    im += a[j].real() * b[j].imag() - a[j].imag() * b[j].real();
  }
  return {re, im};
}

void caxpy_ref(cd alpha, const cd* x, cd* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

double norm2_ref(const cd* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += std::norm(v[j]);
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{sincos_ref,  phase_sum_ref, phase_rotate_ref,
                             cdot_ref,    caxpy_ref,     norm2_ref};
  return t;
}

}  // namespace invit::kernels
