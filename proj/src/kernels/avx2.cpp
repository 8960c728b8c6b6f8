// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// CPUID check, so nothing here may be called unconditionally.
#include <immintrin.h>

#include "freqmux/kernels.hpp"

namespace freqmux::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

std::complex<double> inner_avx2(const double* ar, const double* ai,
                                const double* br, const double* bi,
                                std::size_t n) {
  __m256d re0 = _mm256_setzero_pd();
  __m256d im0 = _mm256_setzero_pd();
  __m256d re1 = _mm256_setzero_pd();
  __m256d im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d xr0 = _mm256_loadu_pd(ar + i);
    const __m256d xi0 = _mm256_loadu_pd(ai + i);
    const __m256d yr0 = _mm256_loadu_pd(br + i);
    const __m256d yi0 = _mm256_loadu_pd(bi + i);
    const __m256d xr1 = _mm256_loadu_pd(ar + i + 4);
    const __m256d xi1 = _mm256_loadu_pd(ai + i + 4);
    const __m256d yr1 = _mm256_loadu_pd(br + i + 4);
    const __m256d yi1 = _mm256_loadu_pd(bi + i + 4);
    re0 = _mm256_fmadd_pd(xr0, yr0, re0);
    re0 = _mm256_fmadd_pd(xi0, yi0, re0);
    im0 = _mm256_fmadd_pd(xr0, yi0, im0);
    im0 = _mm256_fnmadd_pd(xi0, yr0, im0);
    re1 = _mm256_fmadd_pd(xr1, yr1, re1);
    re1 = _mm256_fmadd_pd(xi1, yi1, re1);
    im1 = _mm256_fmadd_pd(xr1, yi1, im1);
    im1 = _mm256_fnmadd_pd(xi1, yr1, im1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + i);
    const __m256d xi = _mm256_loadu_pd(ai + i);
    const __m256d yr = _mm256_loadu_pd(br + i);
    const __m256d yi = _mm256_loadu_pd(bi + i);
    re0 = _mm256_fmadd_pd(xr, yr, re0);
    re0 = _mm256_fmadd_pd(xi, yi, re0);
    im0 = _mm256_fmadd_pd(xr, yi, im0);
    im0 = _mm256_fnmadd_pd(xi, yr, im0);
  }
  double re = hsum(_mm256_add_pd(re0, re1));
  double im = hsum(_mm256_add_pd(im0, im1));
  for (; i < n; ++i) {
    re += ar[i] * br[i] + ai[i] * bi[i];
    im += ar[i] * bi[i] - ai[i] * br[i];
  }
  return {re, im};
}

double norm_sq_avx2(const double* re, const double* im, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    acc = _mm256_fmadd_pd(r, r, acc);
    acc = _mm256_fmadd_pd(m, m, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += re[i] * re[i] + im[i] * im[i];
  return s;
}

double weighted_overlap_sum_avx2(const double* ar, const double* ai,
                                 const double* rows_re, const double* rows_im,
                                 std::size_t cols, std::size_t count,
                                 const double* weights) {
  double total = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const auto z = inner_avx2(ar, ai, rows_re + r * cols, rows_im + r * cols, cols);
    total += weights[r] * (z.real() * z.real() + z.imag() * z.imag());
  }
  return total;
}

void rank1_avx2(double* rho_re, double* rho_im, const double* ar,
                const double* ai, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr_s = w * ar[i];
    const double xi_s = w * ai[i];
    const __m256d xr = _mm256_set1_pd(xr_s);
    const __m256d xi = _mm256_set1_pd(xi_s);
    double* row_re = rho_re + i * n;
    double* row_im = rho_im + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d yr = _mm256_loadu_pd(ar + j);
      const __m256d yi = _mm256_loadu_pd(ai + j);
      __m256d pr = _mm256_loadu_pd(row_re + j);
      __m256d pi = _mm256_loadu_pd(row_im + j);
      pr = _mm256_fmadd_pd(xr, yr, pr);
      pr = _mm256_fmadd_pd(xi, yi, pr);
      pi = _mm256_fmadd_pd(xi, yr, pi);
      pi = _mm256_fnmadd_pd(xr, yi, pi);
      _mm256_storeu_pd(row_re + j, pr);
      _mm256_storeu_pd(row_im + j, pi);
    }
    for (; j < n; ++j) {
      row_re[j] += xr_s * ar[j] + xi_s * ai[j];
      row_im[j] += xi_s * ar[j] - xr_s * ai[j];
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{inner_avx2, norm_sq_avx2,
                                 weighted_overlap_sum_avx2, rank1_avx2};
  return table;
}

}  // namespace freqmux::simd::detail
