#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "freqmux/spectrometer.hpp"

namespace freqmux::serrodyne {

// Travelling-wave phase modulator driven by V0 sin(2 pi nu_rf t).
struct ShifterModel {
  double v_pi;          // V
  double nu_rf;         // Hz
  double v0_max;        // V
  double sigma_jitter;  // drive timing jitter, s

  ShifterModel(double v_pi, double nu_rf, double v0_max, double sigma_jitter = 0.0);
  // v0_max chosen so the full shift range is `total_range_hz`.
  static ShifterModel from_shift_range(double v_pi, double nu_rf, double total_range_hz,
                                       double sigma_jitter = 0.0);

  double max_shift() const;  // Hz
};

// Signed shift in Hz. Throws OverdriveError when |v0| > v0_max.
double shift_magnitude(double v0, const ShifterModel& model);
// Drive amplitude producing `shift_hz`; throws OverdriveError if unreachable.
double drive_voltage(double shift_hz, const ShifterModel& model);

struct LutEntry {
  std::int64_t bin;
  double herald_frequency;  // rad/s
  double shift;             // Hz, the shift the bin asks for
  double v0;                // V, clamped to +-v0_max when out of range
  double drive_phase;       // rad
  bool in_range;
};

class FeedForwardLUT {
 public:
  FeedForwardLUT(std::int64_t first_bin, std::vector<LutEntry> entries);

  std::int64_t first_bin() const { return first_bin_; }
  std::int64_t last_bin() const { return first_bin_ + static_cast<std::int64_t>(entries_.size()) - 1; }
  const std::vector<LutEntry>& entries() const { return entries_; }
  // nullptr for bins outside the table.
  const LutEntry* find(std::int64_t bin) const;
  std::size_t in_range_count() const;

  // One row per bin: bin, herald frequency (GHz), V0 (V), in-range flag.
  void write(std::ostream& out) const;

 private:
  std::int64_t first_bin_;
  std::vector<LutEntry> entries_;
};

// Shift that moves the signal partner of a herald at `herald_frequency`
// (pump energy conservation) onto `target`, in Hz.
double required_shift(double herald_frequency, double pump_center, double target);

// One entry per TDC bin whose center lies in the spectrometer's calibrated
// range. The drive phase locks the pulse to the zero crossing.
FeedForwardLUT build_lut(const spectrometer::SpectrometerModel& spectrometer, double pump_center,
                         double target, const ShifterModel& model);

// Uniformly sampled complex envelope a(t), t = t_start + k dt.
struct TemporalWavepacket {
  double t_start;
  double dt;
  std::vector<std::complex<double>> samples;

  double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  double norm_sq() const;
};

// Transform-limited Gaussian pulse with spectral amplitude std-dev
// `spectral_sigma` (rad/s): a(t) = exp(-(t - t_center)^2 sigma^2 / 2),
// sampled over +-`half_width_sigmas` temporal std-devs.
TemporalWavepacket gaussian_pulse(double spectral_sigma, double t_center = 0.0,
                                  std::size_t points = 1025, double half_width_sigmas = 10.0);

enum class PhaseMode { kSinusoidal, kLinearized };

// Sinusoidal: exp(i (dnu / nu_rf) sin(2 pi nu_rf (t - t_lock))),
// linearized: exp(i 2 pi dnu (t - t_lock)), with dnu = shift_magnitude(v0) and
// t_lock = drive_phase / (2 pi nu_rf).
TemporalWavepacket apply_temporal_phase(const TemporalWavepacket& wavepacket, double v0,
                                        double drive_phase, const ShifterModel& model,
                                        PhaseMode mode);

// S(w) = sum_k a(t_k) exp(-i w t_k) dt on the given angular frequency offsets.
std::vector<std::complex<double>> spectrum(const TemporalWavepacket& wavepacket,
                                           const std::vector<double>& omegas);

// Normalised overlap of two intensity spectra on a common uniform grid:
// sum I_a I_b / sqrt(sum I_a^2 sum I_b^2).
double intensity_overlap(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b);

struct PhaseJitterOptions {
  std::size_t hermite_nodes = 64;
  std::size_t time_points = 513;
  double time_half_width_sigmas = 8.0;
  bool check_refinement = true;
  double refinement_tolerance = 1e-4;
};

// Tr(rho^2) of a Gaussian pulse (spectral amplitude std-dev `photon_sigma`)
// shifted by `shift_hz` with the drive timing offset x ~ N(0, sigma_jitter^2).
// Throws ConvergenceError when refining the quadrature moves the result by
// more than the tolerance.
double phase_jitter_purity(double sigma_jitter, double photon_sigma, double shift_hz,
                           const ShifterModel& model, const PhaseJitterOptions& options = {});

}  // namespace freqmux::serrodyne
