// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 -mfma.  Only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "invit/kernels.hpp"

namespace invit::kernels {
namespace {

using cd = std::complex<double>;

// fdlibm minimax coefficients on [-pi/4, pi/4].
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;
constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// pi/2 split for Cody-Waite reduction.
constexpr double kPio2Hi = 1.57079632679489655800e+00;
constexpr double kPio2Mid = 6.12323399573676603587e-17;
constexpr double kPio2Lo = -1.49738490485916983e-33;

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Lo), r);

  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(S6);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S5));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S2));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S1));
  const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_set1_pd(C6);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C4));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C2));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C1));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d hz = _mm256_mul_pd(_mm256_set1_pd(0.5), z);
  const __m256d w = _mm256_sub_pd(one, hz);
  const __m256d tail = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                       _mm256_sub_pd(_mm256_sub_pd(one, w), hz));
  const __m256d cr = _mm256_add_pd(w, tail);

  // Quadrant from the low bits of j.
  const __m256i q = _mm256_castpd_si256(
      _mm256_add_pd(j, _mm256_set1_pd(6755399441055744.0)));
  const __m256i one_i = _mm256_set1_epi64x(1);
  const __m256i two_i = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(q, one_i), one_i));
  const __m256d neg_s = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(q, two_i), two_i));
  const __m256d neg_c = _mm256_castsi256_pd(_mm256_cmpeq_epi64(
      _mm256_and_si256(_mm256_add_epi64(q, one_i), two_i), two_i));

  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_blendv_pd(sr, cr, swap);
  __m256d c = _mm256_blendv_pd(cr, sr, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(neg_s, sign));
  c = _mm256_xor_pd(c, _mm256_and_pd(neg_c, sign));
  s_out = s;
  c_out = c;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void sincos_avx2(const double* x, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs, vc;
    sincos4(_mm256_loadu_pd(x + i), vs, vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
  }
  if (i < n) {
    alignas(32) double xt[4] = {0, 0, 0, 0}, st[4], ct[4];
    for (std::size_t k = i; k < n; ++k) xt[k - i] = x[k];
    __m256d vs, vc;
    sincos4(_mm256_load_pd(xt), vs, vc);
    _mm256_store_pd(st, vs);
    _mm256_store_pd(ct, vc);
    for (std::size_t k = i; k < n; ++k) {
      s[k] = st[k - i];
      c[k] = ct[k - i];
    }
  }
}

void phase_sum_avx2(const double* w, const double* b, std::size_t nb,
                    const double* a, std::size_t na, double* out_re,
                    double* out_im) {
  const std::size_t nv = nb & ~std::size_t{3};
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    for (std::size_t j = 0; j < nv; j += 4) {
      __m256d vs, vc;
      sincos4(_mm256_mul_pd(ai, _mm256_loadu_pd(b + j)), vs, vc);
      const __m256d wj = _mm256_loadu_pd(w + j);
      re = _mm256_fmadd_pd(wj, vc, re);
      im = _mm256_fnmadd_pd(wj, vs, im);
    }
    if (nv < nb) {
      alignas(32) double bt[4] = {0, 0, 0, 0}, wt[4] = {0, 0, 0, 0};
      for (std::size_t j = nv; j < nb; ++j) {
        bt[j - nv] = b[j];
        wt[j - nv] = w[j];
      }
      __m256d vs, vc;
      sincos4(_mm256_mul_pd(ai, _mm256_load_pd(bt)), vs, vc);
      const __m256d wj = _mm256_load_pd(wt);
      re = _mm256_fmadd_pd(wj, vc, re);
      im = _mm256_fnmadd_pd(wj, vs, im);
    }
    out_re[i] = hsum(re);
    out_im[i] = hsum(im);
  }
}

void phase_rotate_avx2(cd* v, const double* x, double phi, std::size_t n) {
  double* d = reinterpret_cast<double*>(v);
  const __m256d vphi = _mm256_set1_pd(phi);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d vs, vc;
    sincos4(_mm256_mul_pd(vphi, _mm256_loadu_pd(x + j)), vs, vc);
    for (int half = 0; half < 2; ++half) {
      const __m256d c2 = half == 0 ? _mm256_permute4x64_pd(vc, 0x50)
                                   : _mm256_permute4x64_pd(vc, 0xFA);
      const __m256d s2 = half == 0 ? _mm256_permute4x64_pd(vs, 0x50)
                                   : _mm256_permute4x64_pd(vs, 0xFA);
      double* p = d + 2 * (j + 2 * half);
      const __m256d z = _mm256_loadu_pd(p);
      const __m256d t = _mm256_mul_pd(_mm256_permute_pd(z, 0x5), s2);
      _mm256_storeu_pd(p, _mm256_fmsubadd_pd(z, c2, t));
    }
  }
  for (; j < n; ++j) {
    const double t = phi * x[j];
    v[j] *= cd(std::cos(t), -std::sin(t));
  }
}

cd cdot_avx2(const cd* a, const cd* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * j);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * j);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
  }
  // acc_im lanes hold (ar*bi, ai*br) pairs.
  alignas(32) double t[4];
  _mm256_store_pd(t, acc_im);
  double re = hsum(acc_re);
  double im = (t[0] - t[1]) + (t[2] - t[3]);
  for (; j < n; ++j) {
    re += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
    im += a[j].real() * b[j].imag() - a[j].imag() * b[j].real();
  }
  return {re, im};
}

void caxpy_avx2(cd alpha, const cd* x, cd* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * j);
    const __m256d t = _mm256_mul_pd(_mm256_permute_pd(vx, 0x5), ai);
    const __m256d prod = _mm256_fmaddsub_pd(vx, ar, t);
    _mm256_storeu_pd(py + 2 * j, _mm256_add_pd(_mm256_loadu_pd(py + 2 * j), prod));
  }
  for (; j < n; ++j) y[j] += alpha * x[j];
}

double norm2_avx2(const cd* v, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(v);
  const std::size_t m = 2 * n;
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d t = _mm256_loadu_pd(p + j);
    acc = _mm256_fmadd_pd(t, t, acc);
  }
  double s = hsum(acc);
  for (; j < m; ++j) s += p[j] * p[j];
  return s;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable t{sincos_avx2, phase_sum_avx2, phase_rotate_avx2,
                             cdot_avx2,   caxpy_avx2,     norm2_avx2};
  return t;
}

}  // namespace invit::kernels
