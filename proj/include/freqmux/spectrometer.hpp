#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "freqmux/rng.hpp"
#include "freqmux/spectral.hpp"

namespace freqmux::spectrometer {

// Distribution of detection-time error (seconds). Either a zero-mean
// Gaussian (sigma = 0 is a delta) or a histogram with uniform bins that is
// treated as a piecewise-constant density.
class JitterDistribution {
 public:
  static JitterDistribution gaussian(double sigma);
  // `offsets` are bin centers (s, uniformly spaced), `counts` non-negative.
  // Counts are normalised; with `recenter` the mean offset is removed.
  static JitterDistribution tabulated(std::vector<double> offsets, std::vector<double> counts,
                                      bool recenter = true);

  bool is_gaussian() const { return tabulated_density_.empty(); }
  bool is_delta() const { return is_gaussian() && sigma_ == 0.0; }

  double cdf(double t) const;
  double pdf(double t) const;
  double mean() const;
  double stddev() const;
  // Half-width outside of which the distribution carries no mass (histogram)
  // or less than ~1e-15 (Gaussian).
  double support_radius() const;
  double sample(CounterRng& rng) const;
  // Integral of the density over its representation (1 after construction).
  double total_mass() const;

 private:
  double sigma_ = 0.0;
  double first_center_ = 0.0;
  double bin_width_ = 0.0;
  std::vector<double> tabulated_density_;  // per second
  std::vector<double> tabulated_cdf_;      // at left edges, size n + 1
};

// Two-column text: time offset in ps, count. Lines starting with '#' are
// ignored.
JitterDistribution load_jitter_histogram(std::istream& in, bool recenter = true);
JitterDistribution load_jitter_histogram_file(const std::string& path, bool recenter = true);

struct HeraldOutcome {
  std::int64_t time_bin_index;
  double inferred_frequency;  // rad/s
};

// P(bin | wi) over a contiguous run of bins.
struct OutcomeDistribution {
  std::int64_t first_bin = 0;
  std::vector<double> probabilities;
  std::vector<double> frequencies;  // inferred frequency of each bin, rad/s

  double mean() const;
  double stddev() const;
};

// Time-of-flight spectrometer: dispersive delay t = t0 + D (w - w_ref)
// followed by a jittery detector and a TDC with bins centered on t0 + k * bin.
class SpectrometerModel {
 public:
  SpectrometerModel(double dispersion, double tdc_bin, JitterDistribution jitter,
                    double reference_frequency, double calibrated_halfwidth, double t0 = 0.0);

  // Dispersion given in ps/GHz (ordinary frequency), bin and jitter in ps.
  static SpectrometerModel from_lab_units(double ps_per_ghz, double tdc_bin_ps,
                                          JitterDistribution jitter,
                                          double reference_frequency,
                                          double calibrated_halfwidth);

  double dispersion() const { return dispersion_; }
  double tdc_bin() const { return tdc_bin_; }
  const JitterDistribution& jitter() const { return jitter_; }
  double reference_frequency() const { return reference_frequency_; }
  double t0() const { return t0_; }
  double calibrated_halfwidth() const { return calibrated_halfwidth_; }

  double frequency_to_arrival_time(double w) const;
  double arrival_time_to_frequency(double t) const;
  // Nearest bin center; exact ties go to the bin nearer t0.
  std::int64_t time_to_bin(double t) const;
  double bin_center_time(std::int64_t k) const { return t0_ + static_cast<double>(k) * tdc_bin_; }
  double bin_frequency(std::int64_t k) const;
  // Frequency step between adjacent bin centers (rad/s, positive).
  double bin_frequency_width() const;
  // Bin a noiseless photon at w would land in.
  std::int64_t frequency_to_bin(double w) const;

  OutcomeDistribution conditional_outcome_distribution(double wi) const;
  double outcome_probability(std::int64_t k, double wi) const;
  // Std-dev of the outcome frequency error including bin quantisation.
  double frequency_uncertainty() const;

  HeraldOutcome sample_herald_event(double wi, CounterRng& rng) const;

 private:
  double dispersion_;
  double tdc_bin_;
  JitterDistribution jitter_;
  double reference_frequency_;
  double calibrated_halfwidth_;
  double t0_;
};

// P(wi | bin) on `grid` from a prior given as probabilities on the grid
// nodes (summing to 1). Result sums to 1.
std::vector<double> herald_posterior(const SpectrometerModel& model, std::int64_t bin,
                                     const spectral::FrequencyGrid& grid,
                                     std::span<const double> prior);
std::vector<double> herald_posterior(const SpectrometerModel& model, const HeraldOutcome& outcome,
                                     const spectral::FrequencyGrid& grid,
                                     std::span<const double> prior);

}  // namespace freqmux::spectrometer
