#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "freqmux/heralded_state.hpp"
#include "freqmux/loss_budget.hpp"
#include "freqmux/serrodyne.hpp"
#include "freqmux/spectrometer.hpp"
#include "freqmux/statistics.hpp"

namespace freqmux::harness {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "purity-jitter", "purity-gvd", "purity-combined", "stats-sweep",
      "joint-spectrum", "hom-dip", "loss-budget", "lut-dump"};
  return names;
}

// Every tunable of a run. Defaults reproduce the reference experiment; see
// the inline documentation emitted by write_ini().
struct ScenarioConfig {
  // [run]
  std::string scenario = "purity-combined";
  std::uint64_t seed = 20190401;
  std::string output_dir = "freqmux-out";
  double grid_scale = 1.0;
  int verbosity = 1;
  unsigned workers = 0;

  // [source]
  double pump_wavelength_nm = 775.0;
  double signal_wavelength_nm = 1535.0;
  double pump_sigma_ghz = 50.95;
  std::string pump_sigma_convention = "amplitude_1e";
  double filter_width_ghz = 50.0;

  // [spectrometer]
  double dispersion_ps_per_ghz = 16.0;
  double tdc_bin_ps = 33.0;
  std::string jitter_model = "gaussian";
  double jitter_frequency_std_ghz = 23.5;
  std::string jitter_histogram;
  double calibrated_halfwidth_ghz = 500.0;

  // [heralded]
  double herald_span_rad_per_s = 1.11e12;
  int signal_points = 129;
  int herald_points = 129;
  int posterior_points = 65;
  double posterior_sigmas = 6.0;
  bool check_refinement = false;

  // [gvd]
  double fiber_dispersion_ps_nm_km = 18.0;
  double fiber_length_m = 300.0;
  double gvd_wavelength_nm = 1535.0;

  // [shifter]
  double v_pi = 4.0;
  double nu_rf_ghz = 8.0;
  double shift_range_ghz = 170.0;
  double drive_jitter_ps = 5.3;
  std::string phase_mode = "linearized";

  // [statistics]
  double n_modes = 0.0;
  double photon_bandwidth_ghz = 60.0;
  double mu = 0.01;
  double eta_s = 0.14;
  double eta_h = 0.13;
  std::uint64_t pulses = 1000000;
  std::string mu_sweep = "0.002,0.004,0.006,0.008,0.010";

  // [hom]
  double g2_h = 0.14;
  double hom_purity = 0.0;
  double measured_visibility = 0.61;
  double measured_visibility_error = 0.04;
  double delay_span_ps = 30.0;
  int delay_points = 121;

  // [loss]
  std::string loss_table;
  double klyshko_eta_s = 0.14;
  double klyshko_eta_h_low = 0.11;
  double klyshko_eta_h_high = 0.15;
  double loss_tolerance = 0.02;

  // [feedforward]
  std::uint64_t stream_pulses = 100000;
  int histogram_bins = 64;
  double herald_sampling_halfwidth_ghz = 200.0;
  bool shifting = true;
};

struct ConfigField {
  std::string section;
  std::string key;
  std::string doc;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  bool affects_results = true;
};

const std::vector<ConfigField>& config_fields();

// Flat INI-style text: [section] headers, key = value lines.
ScenarioConfig load_config(std::istream& in, ScenarioConfig base = {});
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});
void set_value(ScenarioConfig& cfg, const std::string& dotted_key, const std::string& value);
// Documented defaults (or the current values) as INI text.
void write_ini(std::ostream& out, const ScenarioConfig& cfg);
std::map<std::string, std::map<std::string, std::string>> config_sections(const ScenarioConfig& cfg);

// Throws ConfigError("section.key: reason") for the first invalid field.
void validate(const ScenarioConfig& cfg);

// FNV-1a over every result-affecting key, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

// Model builders.
double signal_center(const ScenarioConfig& cfg);
double pump_center(const ScenarioConfig& cfg);
spectral::PumpEnvelope pump(const ScenarioConfig& cfg);
spectrometer::JitterDistribution jitter(const ScenarioConfig& cfg);
spectrometer::SpectrometerModel spectrometer_model(const ScenarioConfig& cfg);
serrodyne::ShifterModel shifter(const ScenarioConfig& cfg);
double gvd(const ScenarioConfig& cfg);

struct PurityEffects {
  bool jitter = true;
  bool dispersion = true;
};
heralded::HeraldedStateModel heralded_model(const ScenarioConfig& cfg, PurityEffects effects);

double mode_count(const ScenarioConfig& cfg);
stats::MultiplexedStatisticsModel statistics_model(const ScenarioConfig& cfg, bool multiplexed);
std::vector<double> mu_sweep_values(const ScenarioConfig& cfg);

// Loss table from [loss] table, or the built-in component list.
loss::LossTable loss_table(const ScenarioConfig& cfg);
loss::LossTable default_loss_table();

}  // namespace freqmux::harness
