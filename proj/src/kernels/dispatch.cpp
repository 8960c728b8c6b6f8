#include <atomic>
#include <cstdlib>
#include <string>

#include "freqmux/errors.hpp"
#include "freqmux/kernels.hpp"

namespace freqmux::simd {
namespace {

bool cpu_has_avx2() {
#if defined(FREQMUX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const detail::KernelTable& table_for(Backend b) {
#if defined(FREQMUX_HAVE_AVX2)
  if (b == Backend::kAvx2) return detail::avx2_table();
#endif
  (void)b;
  return detail::scalar_table();
}

Backend initial_backend() {
  // FREQMUX_SIMD=scalar pins the reference path for the whole process.
  if (const char* env = std::getenv("FREQMUX_SIMD")) {
    if (std::string(env) == "scalar") return Backend::kScalar;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

const detail::KernelTable& active() { return table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

bool backend_supported(Backend b) {
  return b == Backend::kScalar || (b == Backend::kAvx2 && cpu_has_avx2());
}

Backend active_backend() { return current().load(); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw DomainError(std::string("SIMD backend not supported on this CPU: ") +
                      std::string(backend_name(b)));
  }
  current().store(b);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

std::complex<double> inner(ComplexView a, ComplexView b) {
  if (a.size() != b.size()) throw DomainError("inner: length mismatch");
  return active().inner(a.re.data(), a.im.data(), b.re.data(), b.im.data(), a.size());
}

double norm_sq(ComplexView a) { return active().norm_sq(a.re.data(), a.im.data(), a.size()); }

double weighted_overlap_sum(ComplexView a, const ComplexRows& rows,
                            std::size_t first, std::size_t count,
                            std::span<const double> weights) {
  if (a.size() != rows.cols()) throw DomainError("weighted_overlap_sum: length mismatch");
  if (first + count > rows.rows() || weights.size() < count) {
    throw DomainError("weighted_overlap_sum: row range out of bounds");
  }
  const std::size_t offset = first * rows.cols();
  return active().weighted_overlap_sum(a.re.data(), a.im.data(), rows.data_re() + offset,
                                       rows.data_im() + offset, rows.cols(), count,
                                       weights.data());
}

void hermitian_rank1_update(std::span<double> rho_re, std::span<double> rho_im,
                            ComplexView a, double weight) {
  const std::size_t n = a.size();
  if (rho_re.size() != n * n || rho_im.size() != n * n) {
    throw DomainError("hermitian_rank1_update: matrix size mismatch");
  }
  active().rank1(rho_re.data(), rho_im.data(), a.re.data(), a.im.data(), n, weight);
}

}  // namespace freqmux::simd
