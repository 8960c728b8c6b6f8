#include "freqmux/kernels.hpp"

namespace freqmux::simd::detail {
namespace {

std::complex<double> inner_scalar(const double* ar, const double* ai,
                                  const double* br, const double* bi,
                                  std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += ar[i] * br[i] + ai[i] * bi[i];
    im += ar[i] * bi[i] - ai[i] * br[i];
  }
  return {re, im};
}

double norm_sq_scalar(const double* re, const double* im, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += re[i] * re[i] + im[i] * im[i];
  return s;
}

double weighted_overlap_sum_scalar(const double* ar, const double* ai,
                                   const double* rows_re, const double* rows_im,
                                   std::size_t cols, std::size_t count,
                                   const double* weights) {
  double total = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const auto z = inner_scalar(ar, ai, rows_re + r * cols, rows_im + r * cols, cols);
    total += weights[r] * std::norm(z);
  }
  return total;
}

void rank1_scalar(double* rho_re, double* rho_im, const double* ar,
                  const double* ai, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = w * ar[i];
    const double xi = w * ai[i];
    double* row_re = rho_re + i * n;
    double* row_im = rho_im + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      // (xr + i xi)(ar_j - i ai_j)
      row_re[j] += xr * ar[j] + xi * ai[j];
      row_im[j] += xi * ar[j] - xr * ai[j];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{inner_scalar, norm_sq_scalar,
                                 weighted_overlap_sum_scalar, rank1_scalar};
  return table;
}

}  // namespace freqmux::simd::detail
