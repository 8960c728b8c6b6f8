#include "freqmux/spectrometer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/units.hpp"

namespace freqmux::spectrometer {
namespace {

// Gaussian mass beyond this many sigmas is below 1e-16.
constexpr double kGaussianTailSigmas = 8.3;

}  // namespace

JitterDistribution JitterDistribution::gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("jitter sigma must be >= 0");
  JitterDistribution j;
  j.sigma_ = sigma;
  return j;
}

JitterDistribution JitterDistribution::tabulated(std::vector<double> offsets,
                                                 std::vector<double> counts, bool recenter) {
  if (offsets.size() != counts.size() || offsets.size() < 2) {
    throw DomainError("tabulated jitter: need at least two (offset, count) pairs");
  }
  const double width = offsets[1] - offsets[0];
  if (!(width > 0.0)) throw DomainError("tabulated jitter: offsets must increase");
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (std::abs((offsets[i] - offsets[i - 1]) - width) > 1e-6 * width) {
      throw DomainError("tabulated jitter: offsets must be uniformly spaced");
    }
  }
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw DomainError("tabulated jitter: counts must be non-negative");
    total += c;
  }
  if (!(total > 0.0)) throw DomainError("tabulated jitter: empty histogram");

  JitterDistribution j;
  j.bin_width_ = width;
  j.first_center_ = offsets.front();
  double mean = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) mean += counts[i] / total * offsets[i];
  if (recenter) j.first_center_ -= mean;
  j.tabulated_density_.resize(counts.size());
  j.tabulated_cdf_.assign(counts.size() + 1, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p = counts[i] / total;
    j.tabulated_density_[i] = p / width;
    j.tabulated_cdf_[i + 1] = j.tabulated_cdf_[i] + p;
  }
  j.tabulated_cdf_.back() = 1.0;
  return j;
}

double JitterDistribution::cdf(double t) const {
  if (is_gaussian()) {
    if (sigma_ == 0.0) return t >= 0.0 ? 1.0 : 0.0;
    return numerics::normal_cdf(t / sigma_);
  }
  const double left = first_center_ - 0.5 * bin_width_;
  const double x = (t - left) / bin_width_;
  if (x <= 0.0) return 0.0;
  const auto n = tabulated_density_.size();
  if (x >= static_cast<double>(n)) return 1.0;
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return tabulated_cdf_[i] + frac * (tabulated_cdf_[i + 1] - tabulated_cdf_[i]);
}

double JitterDistribution::pdf(double t) const {
  if (is_gaussian()) {
    if (sigma_ == 0.0) return t == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    const double x = t / sigma_;
    return std::exp(-0.5 * x * x) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
  }
  const double x = (t - (first_center_ - 0.5 * bin_width_)) / bin_width_;
  if (x < 0.0 || x >= static_cast<double>(tabulated_density_.size())) return 0.0;
  return tabulated_density_[static_cast<std::size_t>(x)];
}

double JitterDistribution::mean() const {
  if (is_gaussian()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < tabulated_density_.size(); ++i) {
    m += tabulated_density_[i] * bin_width_ * (first_center_ + static_cast<double>(i) * bin_width_);
  }
  return m;
}

double JitterDistribution::stddev() const {
  if (is_gaussian()) return sigma_;
  const double m = mean();
  double v = bin_width_ * bin_width_ / 12.0;
  for (std::size_t i = 0; i < tabulated_density_.size(); ++i) {
    const double d = first_center_ + static_cast<double>(i) * bin_width_ - m;
    v += tabulated_density_[i] * bin_width_ * d * d;
  }
  return std::sqrt(v);
}

double JitterDistribution::support_radius() const {
  if (is_gaussian()) return kGaussianTailSigmas * sigma_;
  const double left = first_center_ - 0.5 * bin_width_;
  const double right = left + bin_width_ * static_cast<double>(tabulated_density_.size());
  return std::max(std::abs(left), std::abs(right));
}

double JitterDistribution::sample(CounterRng& rng) const {
  if (is_gaussian()) {
    if (sigma_ == 0.0) return 0.0;
    std::normal_distribution<double> normal(0.0, sigma_);
    return normal(rng);
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  auto it = std::upper_bound(tabulated_cdf_.begin() + 1, tabulated_cdf_.end(), u);
  if (it == tabulated_cdf_.end()) --it;
  const auto i = static_cast<std::size_t>(std::distance(tabulated_cdf_.begin(), it) - 1);
  const double left = first_center_ - 0.5 * bin_width_ + static_cast<double>(i) * bin_width_;
  return left + uniform(rng) * bin_width_;
}

double JitterDistribution::total_mass() const {
  if (is_gaussian()) return 1.0;
  double s = 0.0;
  for (double d : tabulated_density_) s += d * bin_width_;
  return s;
}

JitterDistribution load_jitter_histogram(std::istream& in, bool recenter) {
  std::vector<double> offsets;
  std::vector<double> counts;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t_ps, c;
    if (!(ls >> t_ps >> c)) throw DomainError("jitter histogram: malformed line: " + line);
    offsets.push_back(units::ps_to_s(t_ps));
    counts.push_back(c);
  }
  return JitterDistribution::tabulated(std::move(offsets), std::move(counts), recenter);
}

JitterDistribution load_jitter_histogram_file(const std::string& path, bool recenter) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open jitter histogram: " + path);
  return load_jitter_histogram(in, recenter);
}

double OutcomeDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) m += probabilities[i] * frequencies[i];
  return m;
}

double OutcomeDistribution::stddev() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double d = frequencies[i] - m;
    v += probabilities[i] * d * d;
  }
  return std::sqrt(v);
}

SpectrometerModel::SpectrometerModel(double dispersion, double tdc_bin, JitterDistribution jitter,
                                     double reference_frequency, double calibrated_halfwidth,
                                     double t0)
    : dispersion_(dispersion),
      tdc_bin_(tdc_bin),
      jitter_(std::move(jitter)),
      reference_frequency_(reference_frequency),
      calibrated_halfwidth_(calibrated_halfwidth),
      t0_(t0) {
  if (!(dispersion != 0.0) || !std::isfinite(dispersion)) {
    throw DomainError("SpectrometerModel: dispersion must be non-zero");
  }
  if (!(tdc_bin > 0.0)) throw DomainError("SpectrometerModel: TDC bin must be positive");
  if (!(calibrated_halfwidth > 0.0)) throw DomainError("SpectrometerModel: calibrated range must be positive");
  if (std::abs(jitter_.total_mass() - 1.0) > 1e-6) {
    throw DomainError("SpectrometerModel: jitter distribution is not normalised");
  }
}

SpectrometerModel SpectrometerModel::from_lab_units(double ps_per_ghz, double tdc_bin_ps,
                                                    JitterDistribution jitter,
                                                    double reference_frequency,
                                                    double calibrated_halfwidth) {
  return {units::ps_per_ghz_to_s_per_rad(ps_per_ghz), units::ps_to_s(tdc_bin_ps),
          std::move(jitter), reference_frequency, calibrated_halfwidth};
}

double SpectrometerModel::frequency_to_arrival_time(double w) const {
  if (!(std::abs(w - reference_frequency_) <= calibrated_halfwidth_)) {
    throw OutOfRangeError("frequency outside the calibrated spectrometer range");
  }
  return t0_ + dispersion_ * (w - reference_frequency_);
}

double SpectrometerModel::arrival_time_to_frequency(double t) const {
  return reference_frequency_ + (t - t0_) / dispersion_;
}

std::int64_t SpectrometerModel::time_to_bin(double t) const {
  const double x = (t - t0_) / tdc_bin_;
  const double k = std::ceil(std::abs(x) - 0.5);
  return static_cast<std::int64_t>(x < 0.0 ? -k : k);
}

double SpectrometerModel::bin_frequency(std::int64_t k) const {
  return arrival_time_to_frequency(bin_center_time(k));
}

double SpectrometerModel::bin_frequency_width() const { return tdc_bin_ / std::abs(dispersion_); }

std::int64_t SpectrometerModel::frequency_to_bin(double w) const {
  return time_to_bin(frequency_to_arrival_time(w));
}

double SpectrometerModel::outcome_probability(std::int64_t k, double wi) const {
  const double ti = frequency_to_arrival_time(wi);
  if (jitter_.is_delta()) return time_to_bin(ti) == k ? 1.0 : 0.0;
  const double center = bin_center_time(k);
  const double lo = center - 0.5 * tdc_bin_ - ti;
  const double hi = center + 0.5 * tdc_bin_ - ti;
  return std::max(0.0, jitter_.cdf(hi) - jitter_.cdf(lo));
}

OutcomeDistribution SpectrometerModel::conditional_outcome_distribution(double wi) const {
  const double ti = frequency_to_arrival_time(wi);
  OutcomeDistribution d;
  if (jitter_.is_delta()) {
    d.first_bin = time_to_bin(ti);
    d.probabilities = {1.0};
    d.frequencies = {bin_frequency(d.first_bin)};
    return d;
  }
  const double r = jitter_.support_radius();
  const std::int64_t a = time_to_bin(ti - r);
  const std::int64_t b = time_to_bin(ti + r);
  d.first_bin = a;
  double total = 0.0;
  for (std::int64_t k = a; k <= b; ++k) {
    const double p = outcome_probability(k, wi);
    d.probabilities.push_back(p);
    d.frequencies.push_back(bin_frequency(k));
    total += p;
  }
  for (double& p : d.probabilities) p /= total;
  return d;
}

double SpectrometerModel::frequency_uncertainty() const {
  const double sj = jitter_.stddev();
  return std::sqrt(sj * sj + tdc_bin_ * tdc_bin_ / 12.0) / std::abs(dispersion_);
}

HeraldOutcome SpectrometerModel::sample_herald_event(double wi, CounterRng& rng) const {
  const double t = frequency_to_arrival_time(wi) + jitter_.sample(rng);
  const std::int64_t k = time_to_bin(t);
  return {k, bin_frequency(k)};
}

std::vector<double> herald_posterior(const SpectrometerModel& model, std::int64_t bin,
                                     const spectral::FrequencyGrid& grid,
                                     std::span<const double> prior) {
  if (prior.size() != grid.points()) throw DomainError("herald_posterior: prior size mismatch");
  std::vector<double> post(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    if (prior[i] < 0.0) throw DomainError("herald_posterior: negative prior");
    post[i] = prior[i] > 0.0 ? model.outcome_probability(bin, grid[i]) * prior[i] : 0.0;
  }
  const double evidence = numerics::pairwise_sum(post);
  if (!(evidence > 0.0)) throw ZeroEvidenceError("herald_posterior: outcome has zero evidence under the prior");
  for (double& p : post) p /= evidence;
  return post;
}

std::vector<double> herald_posterior(const SpectrometerModel& model, const HeraldOutcome& outcome,
                                     const spectral::FrequencyGrid& grid,
                                     std::span<const double> prior) {
  return herald_posterior(model, outcome.time_bin_index, grid, prior);
}

}  // namespace freqmux::spectrometer
