#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "freqmux/harness/config.hpp"
#include "freqmux/rng.hpp"
#include "freqmux/serrodyne.hpp"
#include "freqmux/spectral.hpp"
#include "freqmux/spectrometer.hpp"

namespace freqmux::harness {

struct EventRecord {
  std::uint64_t pulse;
  double omega_s;  // signal before shifting, rad/s
  double omega_i;  // true herald frequency
  std::int64_t herald_bin;
  double omega_h;  // inferred herald frequency
  double shift_hz;
  bool in_range;
  double omega_out;
  bool passed;  // output inside the filter window
  bool herald_click;
  bool signal_click;
};

// Counts on a uniform 2-D grid; out-of-range samples are dropped.
class Histogram2D {
 public:
  Histogram2D(double x_lo, double x_hi, double y_lo, double y_hi, int bins);

  void add(double x, double y);
  std::uint64_t count(int ix, int iy) const { return counts_[static_cast<std::size_t>(iy * bins_ + ix)]; }
  std::uint64_t total() const;
  int bins() const { return bins_; }
  // Header with axis ranges, then `bins` rows (y) of `bins` counts (x).
  void write(std::ostream& out) const;

 private:
  double x_lo_, x_hi_, y_lo_, y_hi_;
  int bins_;
  std::vector<std::uint64_t> counts_;
};

struct FeedforwardSetup {
  spectral::PumpEnvelope pump;
  double filter_center;
  double filter_width;
  spectrometer::SpectrometerModel spectrometer;
  serrodyne::ShifterModel shifter;
  serrodyne::FeedForwardLUT lut;
  serrodyne::PhaseMode mode = serrodyne::PhaseMode::kLinearized;
  bool shifting = true;
  double herald_halfwidth;  // herald frequencies are drawn uniformly from +- this
  double eta_s = 1.0;
  double eta_h = 1.0;
  int histogram_bins = 64;
  unsigned workers = 0;
};

FeedforwardSetup feedforward_setup(const ScenarioConfig& cfg);

struct FeedforwardResult {
  std::vector<EventRecord> events;
  Histogram2D unshifted;  // (w_H - herald center, w_s - w_c), every pair, GHz
  Histogram2D shifted;    // (w_H - herald center, w_out - w_c), filtered pairs, GHz
  double r_unshifted;     // Pearson r of (w_H, w_s) over every pair
  double r_shifted;       // Pearson r of (w_H, w_out) over filtered pairs
  std::uint64_t in_range = 0;
  std::uint64_t passed = 0;
};

// Pairs are drawn from the joint spectral intensity with a flat herald
// marginal, heralded through the spectrometer, shifted from the LUT and
// filtered. Blocks of pulses use split RNG streams, so the stream does not
// depend on the worker count.
FeedforwardResult simulate_feedforward_stream(const FeedforwardSetup& setup, std::uint64_t pulses,
                                              const CounterRng& rng);

void write_events(std::ostream& out, const std::vector<EventRecord>& events);

}  // namespace freqmux::harness
