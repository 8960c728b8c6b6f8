#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace freqmux::numerics {

// Trapezoid weights for `n` uniformly spaced nodes with spacing `h`.
std::vector<double> trapezoid_weights(std::size_t n, double h);

// Pairwise (tree) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Gauss-Hermite rule for weight exp(-x^2), via Golub-Welsch.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(std::size_t n);

// Nodes/weights for E[f(X)], X ~ N(0, sigma^2). Weights sum to 1.
GaussHermiteRule gaussian_expectation_rule(std::size_t n, double sigma);

// Weighted Pearson correlation of (x, y) samples.
double pearson(std::span<const double> x, std::span<const double> y,
               std::span<const double> w = {});

// Static block partition of [0, n) over `workers` threads. Each index is
// visited exactly once; callers write per-index results so reductions stay
// independent of the worker count.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
}

unsigned default_workers();

}  // namespace freqmux::numerics
