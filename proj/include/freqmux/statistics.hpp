#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "freqmux/rng.hpp"

namespace freqmux::stats {

// N independent thermal frequency modes (N may be fractional: the last
// mode carries mu times the fractional part), lossy arms, threshold
// detectors. With multiplexing a herald click in any mode routes that
// mode's signal to the output; without it only the central mode is used.
struct MultiplexedStatisticsModel {
  double n_modes = 1.0;
  double mu = 0.0;  // mean pairs per mode per pulse
  double eta_s = 1.0;
  double eta_h = 1.0;
  bool multiplexing_enabled = true;

  void validate() const;
  // Number of simulated modes (ceil of n_modes, or 1 without multiplexing).
  std::size_t mode_slots() const;
  double mode_mean(std::size_t i) const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct CountingResult {
  Estimate p_h, p_s, p_sh, p_s1s2h, p_s1h, p_s2h;
  Estimate g2_h;  // NaN when undefined (no heralded signal)
  std::uint64_t pulses = 0;  // 0 for analytic results
  bool analytic = false;
  std::uint64_t seed = 0;
};

double effective_mode_count(double shift_range_hz, double photon_bandwidth_hz);

// Exact enumeration of every configuration with at most two pairs in total,
// i.e. correct to second order in mu. Requires mu * n_modes < 0.1.
CountingResult analytic_counting(const MultiplexedStatisticsModel& model);

// Pulses are processed in fixed blocks, each with its own split RNG
// stream, so counts do not depend on the worker count.
CountingResult monte_carlo_counting(const MultiplexedStatisticsModel& model, std::uint64_t pulses,
                                    const CounterRng& rng, unsigned workers = 0);

// Per-pulse indicator tallies.
struct EventCounts {
  std::uint64_t h = 0, s = 0, sh = 0, s1s2h = 0, s1h = 0, s2h = 0;
};
CountingResult counting_from_counts(const EventCounts& counts, std::uint64_t pulses);

struct ArmEfficiencies {
  double eta_s;
  double eta_h;
};
// eta_s = P(S,H)/P(H), eta_h = P(S,H)/P(S).
ArmEfficiencies klyshko_efficiencies(const CountingResult& counts);

double hom_visibility(double purity, double g2_h);
// R(t) = 1 - V exp(-(sigma_eff t)^2) for Gaussian photons with spectral
// amplitude std-dev `photon_sigma` (rad/s); sigma_eff = photon_sigma / sqrt 2.
std::vector<double> hom_dip_curve(double purity, double g2_h, double photon_sigma,
                                  const std::vector<double>& delays);
// Visibility above 1/2 cannot come from phase-independent classical sources.
inline bool is_nonclassical(double visibility) { return visibility > 0.5; }

void write_counting_header(std::ostream& out);
void write_counting_row(std::ostream& out, const std::string& config_hash,
                        const MultiplexedStatisticsModel& model, const CountingResult& result);

}  // namespace freqmux::stats
