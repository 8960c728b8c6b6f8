#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/rng.hpp"
#include "freqmux/spectrometer.hpp"
#include "freqmux/units.hpp"

using namespace freqmux;
using namespace freqmux::spectrometer;

namespace {

const double kRef = units::wavelength_to_angular(1550e-9);
const double kRange = units::ghz_to_rad_per_s(500.0);

SpectrometerModel lab_model(double jitter_ps, double bin_ps = 33.0) {
  return SpectrometerModel::from_lab_units(16.0, bin_ps,
                                           JitterDistribution::gaussian(units::ps_to_s(jitter_ps)),
                                           kRef, kRange);
}

}  // namespace

TEST_CASE("1 GHz of detuning maps to 16 ps of delay") {
  const auto m = lab_model(0.0);
  const double dt = m.frequency_to_arrival_time(kRef + units::ghz_to_rad_per_s(1.0)) -
                    m.frequency_to_arrival_time(kRef);
  CHECK(units::s_to_ps(dt) == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(m.arrival_time_to_frequency(m.frequency_to_arrival_time(kRef + 1e11)) ==
        doctest::Approx(kRef + 1e11).epsilon(1e-15));
}

TEST_CASE("arrival time is strictly monotone in frequency") {
  const auto m = lab_model(0.0);
  double prev = -1.0;
  for (int i = -50; i <= 50; ++i) {
    const double t = m.frequency_to_arrival_time(kRef + i * units::ghz_to_rad_per_s(9.0));
    if (i > -50) CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("a 33 ps TDC bin is 2.06 GHz wide") {
  const auto m = lab_model(0.0);
  CHECK(units::rad_per_s_to_ghz(m.bin_frequency_width()) == doctest::Approx(2.0625).epsilon(1e-12));
}

TEST_CASE("frequencies outside the calibrated range are rejected") {
  const auto m = lab_model(10.0);
  CHECK_THROWS_AS(m.frequency_to_arrival_time(kRef + 1.01 * kRange), OutOfRangeError);
  CHECK_THROWS_AS(m.conditional_outcome_distribution(kRef - 1.5 * kRange), OutOfRangeError);
}

TEST_CASE("bin rounding ties go toward t0") {
  const auto m = lab_model(0.0, 10.0);
  const double b = m.tdc_bin();
  CHECK(m.time_to_bin(0.5 * b) == 0);
  CHECK(m.time_to_bin(-0.5 * b) == 0);
  CHECK(m.time_to_bin(1.5 * b) == 1);
  CHECK(m.time_to_bin(-1.5 * b) == -1);
  CHECK(m.time_to_bin(0.51 * b) == 1);
  CHECK(m.time_to_bin(-2.49 * b) == -2);
}

TEST_CASE("outcome distributions sum to one") {
  for (double jitter : {0.0, 20.0, 160.0, 400.0}) {
    const auto m = lab_model(jitter);
    for (double ghz : {-100.0, 0.0, 0.37, 250.0}) {
      const auto d = m.conditional_outcome_distribution(kRef + units::ghz_to_rad_per_s(ghz));
      const double s = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
      for (double p : d.probabilities) CHECK(p >= 0.0);
    }
  }
}

TEST_CASE("10 GHz frequency jitter gives a 23.5 GHz wide outcome distribution") {
  // 10 GHz of frequency std-dev is 160 ps of timing std-dev at 16 ps/GHz.
  const auto m = lab_model(160.0);
  const auto d = m.conditional_outcome_distribution(kRef);
  const double fwhm = units::kFwhmPerSigma * units::rad_per_s_to_ghz(d.stddev());
  CHECK(fwhm == doctest::Approx(2.3548 * 10.0).epsilon(0.01));
  CHECK(d.stddev() == doctest::Approx(m.frequency_uncertainty()).epsilon(1e-3));
  CHECK(std::abs(d.mean() - kRef) < 1e-3 * m.bin_frequency_width());
}

TEST_CASE("outcome probabilities match the Gaussian CDF oracle") {
  const auto m = lab_model(50.0);
  const double wi = kRef + units::ghz_to_rad_per_s(3.3);
  const double ti = m.frequency_to_arrival_time(wi);
  const double s = units::ps_to_s(50.0);
  for (std::int64_t k = -10; k <= 10; ++k) {
    const double c = m.bin_center_time(k);
    const double oracle = numerics::normal_cdf((c + 0.5 * m.tdc_bin() - ti) / s) -
                          numerics::normal_cdf((c - 0.5 * m.tdc_bin() - ti) / s);
    CHECK(m.outcome_probability(k, wi) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("flat prior posterior is a Gaussian centred on the bin frequency") {
  const auto m = lab_model(160.0);
  const std::int64_t k = 12;
  const double wk = m.bin_frequency(k);
  const double sw = units::ghz_to_rad_per_s(10.0);
  spectral::FrequencyGrid grid(wk, 16.0 * sw, 801);
  std::vector<double> prior(grid.points(), 1.0 / static_cast<double>(grid.points()));
  const auto post = herald_posterior(m, k, grid, prior);
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < grid.points(); ++i) mean += post[i] * grid[i];
  for (std::size_t i = 0; i < grid.points(); ++i) var += post[i] * (grid[i] - mean) * (grid[i] - mean);
  CHECK(std::abs(mean - wk) < 1e-3 * sw);
  // Box of one bin convolved with the jitter Gaussian.
  const double oracle = std::sqrt(sw * sw + std::pow(m.bin_frequency_width(), 2) / 12.0);
  CHECK(std::sqrt(var) == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("ideal detection gives a posterior confined to one bin") {
  const auto m = lab_model(0.0);
  spectral::FrequencyGrid grid(kRef, 20.0 * m.bin_frequency_width(), 401);
  std::vector<double> prior(grid.points(), 1.0 / static_cast<double>(grid.points()));
  const auto post = herald_posterior(m, 3, grid, prior);
  for (std::size_t i = 0; i < grid.points(); ++i) {
    if (std::abs(grid[i] - m.bin_frequency(3)) > 0.5 * m.bin_frequency_width() + 1.0) {
      CHECK(post[i] == 0.0);
    }
  }
}

TEST_CASE("posterior obeys Bayes' rule against a direct oracle") {
  const auto m = lab_model(80.0);
  spectral::FrequencyGrid grid(kRef, units::ghz_to_rad_per_s(60.0), 121);
  std::vector<double> prior(grid.points());
  double z = 0.0;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double x = units::rad_per_s_to_ghz(grid[i] - kRef) / 12.0;
    prior[i] = std::exp(-0.5 * x * x);
    z += prior[i];
  }
  for (double& p : prior) p /= z;
  for (std::int64_t k : {-4, 0, 2}) {
    const auto post = herald_posterior(m, k, grid, prior);
    std::vector<double> oracle(grid.points());
    double ev = 0.0;
    for (std::size_t i = 0; i < grid.points(); ++i) {
      oracle[i] = m.outcome_probability(k, grid[i]) * prior[i];
      ev += oracle[i];
    }
    for (std::size_t i = 0; i < grid.points(); ++i) CHECK(post[i] == doctest::Approx(oracle[i] / ev));
  }
  std::vector<double> zero(grid.points(), 0.0);
  CHECK_THROWS_AS(herald_posterior(m, 0, grid, zero), ZeroEvidenceError);
  const auto ideal = lab_model(0.0);
  CHECK_THROWS_AS(herald_posterior(ideal, 400, grid, prior), ZeroEvidenceError);
}

TEST_CASE("sampled herald outcomes follow the outcome distribution") {
  const auto m = lab_model(60.0);
  const double wi = kRef + units::ghz_to_rad_per_s(1.1);
  const auto d = m.conditional_outcome_distribution(wi);
  CounterRng rng(77);
  const int n = 100000;
  std::map<std::int64_t, int> counts;
  for (int i = 0; i < n; ++i) ++counts[m.sample_herald_event(wi, rng).time_bin_index];
  // Pool sparse tail bins so every cell expects at least 5 counts.
  double chi2 = 0.0, tail_expected = 0.0, tail_observed = 0.0;
  int cells = 0;
  for (std::size_t j = 0; j < d.probabilities.size(); ++j) {
    const std::int64_t k = d.first_bin + static_cast<std::int64_t>(j);
    const double e = n * d.probabilities[j];
    const double o = counts.count(k) ? counts[k] : 0.0;
    if (e < 5.0) {
      tail_expected += e;
      tail_observed += o;
      continue;
    }
    chi2 += (o - e) * (o - e) / e;
    ++cells;
  }
  if (tail_expected > 0.0) {
    chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) / std::max(tail_expected, 1.0);
    ++cells;
  }
  boost::math::chi_squared dist(cells - 1);
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));
  CHECK(p > 0.01);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const auto m = lab_model(160.0);
  CounterRng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(m.sample_herald_event(kRef, a).time_bin_index == m.sample_herald_event(kRef, b).time_bin_index);
  }
}

TEST_CASE("tabulated jitter histogram loads, normalises and recentres") {
  std::istringstream in(
      "# offset_ps, count\n"
      "-20, 1\n"
      "-10, 4\n"
      "0, 6\n"
      "10, 4\n"
      "20, 1\n"
      "30, 0\n");
  const auto j = load_jitter_histogram(in);
  CHECK_FALSE(j.is_gaussian());
  CHECK(j.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(j.mean()) < 1e-18);
  CHECK(j.cdf(-1.0) == 0.0);
  CHECK(j.cdf(1.0) == doctest::Approx(1.0));
  CHECK(j.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Discrete variance plus the uniform spread within a 10 ps bin.
  const double var_ps = (400.0 * 2 + 100.0 * 8) / 16.0 + 100.0 / 12.0;
  CHECK(units::s_to_ps(j.stddev()) == doctest::Approx(std::sqrt(var_ps)).epsilon(1e-9));
  CounterRng rng(3);
  double s = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = j.sample(rng);
    CHECK(std::abs(x) <= j.support_radius());
    s += x;
  }
  CHECK(std::abs(s / 20000.0) < 0.05 * j.stddev());

  std::istringstream uneven("0 1\n10 1\n25 1\n");
  CHECK_THROWS_AS(load_jitter_histogram(uneven), DomainError);
  std::istringstream empty("0 0\n10 0\n");
  CHECK_THROWS_AS(load_jitter_histogram(empty), DomainError);
}

TEST_CASE("tabulated and gaussian jitter give matching outcome spreads") {
  std::vector<double> offsets, counts;
  const double s = units::ps_to_s(100.0);
  for (int i = -400; i <= 400; ++i) {
    const double t = i * units::ps_to_s(2.0);
    offsets.push_back(t);
    counts.push_back(std::exp(-0.5 * t * t / (s * s)));
  }
  const auto tab = SpectrometerModel::from_lab_units(
      16.0, 33.0, JitterDistribution::tabulated(offsets, counts), kRef, kRange);
  const auto gau = lab_model(100.0);
  const auto a = tab.conditional_outcome_distribution(kRef);
  const auto b = gau.conditional_outcome_distribution(kRef);
  CHECK(a.stddev() == doctest::Approx(b.stddev()).epsilon(2e-3));
}
