#include "freqmux/numerics.hpp"

#include <Eigen/Eigenvalues>

#include "freqmux/errors.hpp"

namespace freqmux::numerics {

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  if (n > 0) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite: need at least one node");
  // Jacobi matrix for Hermite polynomials: off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericError("gauss_hermite: eigen solver failed");
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

GaussHermiteRule gaussian_expectation_rule(std::size_t n, double sigma) {
  auto rule = gauss_hermite(n);
  const double scale = std::numbers::sqrt2 * sigma;
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] *= scale;
    rule.weights[i] *= norm;
  }
  return rule;
}

double pearson(std::span<const double> x, std::span<const double> y,
               std::span<const double> w) {
  if (x.size() != y.size() || (!w.empty() && w.size() != x.size())) {
    throw DomainError("pearson: length mismatch");
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  if (sw <= 0) throw DomainError("pearson: no weight");
  const double mx = sx / sw;
  const double my = sy / sw;
  double cxx = 0, cyy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    cxx += wi * dx * dx;
    cyy += wi * dy * dy;
    cxy += wi * dx * dy;
  }
  if (cxx <= 0 || cyy <= 0) throw DomainError("pearson: zero variance");
  return cxy / std::sqrt(cxx * cyy);
}

unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

}  // namespace freqmux::numerics
