#pragma once

// Data-parallel inner loops used by the quadrature engines. Each kernel has a
// portable scalar reference and an AVX2+FMA variant; the variant is chosen at
// runtime from CPUID and can be forced for equivalence testing.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace freqmux::simd {

enum class Backend { kScalar, kAvx2 };

// Split-storage complex vector view (real and imaginary parts in separate
// arrays). Both spans have equal length.
struct ComplexView {
  std::span<const double> re;
  std::span<const double> im;
  std::size_t size() const { return re.size(); }
};

// Owning split-storage complex vector.
struct ComplexVector {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVector() = default;
  explicit ComplexVector(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
  std::size_t size() const { return re.size(); }
  ComplexView view() const { return {re, im}; }
  std::complex<double> at(std::size_t i) const { return {re[i], im[i]}; }
  void set(std::size_t i, std::complex<double> z) {
    re[i] = z.real();
    im[i] = z.imag();
  }
};

// Row-major stack of equal-length split complex vectors.
class ComplexRows {
 public:
  ComplexRows(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), re_(rows * cols, 0.0), im_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  ComplexView row(std::size_t r) const {
    return {std::span<const double>(re_).subspan(r * cols_, cols_),
            std::span<const double>(im_).subspan(r * cols_, cols_)};
  }
  double* row_re(std::size_t r) { return re_.data() + r * cols_; }
  double* row_im(std::size_t r) { return im_.data() + r * cols_; }
  const double* data_re() const { return re_.data(); }
  const double* data_im() const { return im_.data(); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> re_;
  std::vector<double> im_;
};

// <a|b> = sum conj(a_i) b_i
std::complex<double> inner(ComplexView a, ComplexView b);

double norm_sq(ComplexView a);

// sum_r weights[r] * |<a|rows[first + r]>|^2 over `count` rows.
double weighted_overlap_sum(ComplexView a, const ComplexRows& rows,
                            std::size_t first, std::size_t count,
                            std::span<const double> weights);

// rho += weight * |a><a| for a dense row-major n x n Hermitian matrix held
// as split real/imaginary arrays.
void hermitian_rank1_update(std::span<double> rho_re, std::span<double> rho_im,
                            ComplexView a, double weight);

Backend active_backend();
bool backend_supported(Backend b);
// Throws DomainError if the CPU cannot run `b`.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

// Scoped backend override for tests and benchmarks.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

namespace detail {

struct KernelTable {
  std::complex<double> (*inner)(const double*, const double*, const double*,
                                const double*, std::size_t);
  double (*norm_sq)(const double*, const double*, std::size_t);
  double (*weighted_overlap_sum)(const double*, const double*, const double*,
                                 const double*, std::size_t, std::size_t,
                                 const double*);
  void (*rank1)(double*, double*, const double*, const double*, std::size_t,
                double);
};

const KernelTable& scalar_table();
#if defined(FREQMUX_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace detail
}  // namespace freqmux::simd
