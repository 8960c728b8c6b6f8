#include "freqmux/harness/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "freqmux/errors.hpp"
#include "freqmux/units.hpp"

namespace freqmux::harness {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string to_text(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

template <class T>
T from_text(const std::string& name, const std::string& text) {
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_same_v<T, bool>) {
    std::string l = text;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw ConfigError(name + ": expected a boolean, got '" + text + "'");
  } else {
    T v{};
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw ConfigError(name + ": cannot parse '" + text + "'");
    }
    return v;
  }
}

template <class T>
ConfigField field(std::string section, std::string key, std::string doc, T ScenarioConfig::*m,
                  bool affects_results = true) {
  const std::string name = section + "." + key;
  return {std::move(section), std::move(key), std::move(doc),
          [m](const ScenarioConfig& c) { return to_text(c.*m); },
          [m, name](ScenarioConfig& c, const std::string& v) { c.*m = from_text<T>(name, v); },
          affects_results};
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void require(bool ok, const std::string& name, const std::string& reason) {
  if (!ok) throw ConfigError(name + ": " + reason);
}

std::size_t scaled_points(int n, double scale, std::size_t minimum) {
  const double half = std::round(0.5 * static_cast<double>(n - 1) * scale);
  return std::max(minimum, static_cast<std::size_t>(2.0 * half) + 1);
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  using C = ScenarioConfig;
  static const std::vector<ConfigField> fields{
      field("run", "scenario", "one of purity-jitter, purity-gvd, purity-combined, stats-sweep, joint-spectrum, hom-dip, loss-budget, lut-dump", &C::scenario),
      field("run", "seed", "RNG seed for every Monte Carlo stage", &C::seed),
      field("run", "output_dir", "directory receiving data files and manifest.json", &C::output_dir, false),
      field("run", "grid_scale", "multiplies quadrature node counts (0.5 for quick runs)", &C::grid_scale),
      field("run", "verbosity", "0 quiet, 1 summary, 2 progress", &C::verbosity, false),
      field("run", "workers", "worker threads, 0 = hardware concurrency", &C::workers, false),

      field("source", "pump_wavelength_nm", "pump center (sum frequency), 775 nm", &C::pump_wavelength_nm),
      field("source", "signal_wavelength_nm", "output filter center w_c, 1535 nm", &C::signal_wavelength_nm),
      field("source", "pump_sigma_ghz", "pump width sigma/2pi, 50.95 GHz", &C::pump_sigma_ghz),
      field("source", "pump_sigma_convention", "amplitude_1e: amplitude exp(-x^2/sigma^2) (60 GHz intensity FWHM); amplitude_std: exp(-x^2/2sigma^2); intensity_fwhm", &C::pump_sigma_convention),
      field("source", "filter_width_ghz", "top-hat output filter full width, 50 GHz", &C::filter_width_ghz),

      field("spectrometer", "dispersion_ps_per_ghz", "FBG delay per GHz, 16 ps/GHz", &C::dispersion_ps_per_ghz),
      field("spectrometer", "tdc_bin_ps", "TDC resolution, 33 ps", &C::tdc_bin_ps),
      field("spectrometer", "jitter_model", "gaussian, histogram or none", &C::jitter_model),
      field("spectrometer", "jitter_frequency_std_ghz", "Gaussian jitter expressed as herald frequency std-dev; 23.5 GHz stands in for the measured histogram", &C::jitter_frequency_std_ghz),
      field("spectrometer", "jitter_histogram", "two-column file (ps, counts) used when jitter_model = histogram", &C::jitter_histogram),
      field("spectrometer", "calibrated_halfwidth_ghz", "half-width of the calibrated frequency range", &C::calibrated_halfwidth_ghz),

      field("heralded", "herald_span_rad_per_s", "herald acceptance span, 1.11e12 rad/s (capped by the shift range)", &C::herald_span_rad_per_s),
      field("heralded", "signal_points", "signal nodes across the output filter", &C::signal_points),
      field("heralded", "herald_points", "herald outcome nodes with ideal detection", &C::herald_points),
      field("heralded", "posterior_points", "w_i nodes per herald outcome", &C::posterior_points),
      field("heralded", "posterior_sigmas", "half-width of the w_i grid in uncertainty std-devs", &C::posterior_sigmas),
      field("heralded", "check_refinement", "refine the quadrature once and fail on > 1e-3 change", &C::check_refinement),

      field("gvd", "fiber_dispersion_ps_nm_km", "delay-line dispersion D, 18 ps/(nm km)", &C::fiber_dispersion_ps_nm_km),
      field("gvd", "fiber_length_m", "delay-line length, 300 m", &C::fiber_length_m),
      field("gvd", "wavelength_nm", "wavelength for the D to beta2 conversion, 1535 nm", &C::gvd_wavelength_nm),

      field("shifter", "v_pi", "modulator half-wave voltage (V); only ratios to v0 matter", &C::v_pi),
      field("shifter", "nu_rf_ghz", "drive frequency, 8 GHz", &C::nu_rf_ghz),
      field("shifter", "shift_range_ghz", "total shift range 2 dnu_max, 170 GHz", &C::shift_range_ghz),
      field("shifter", "drive_jitter_ps", "drive timing jitter, 5.3 ps", &C::drive_jitter_ps),
      field("shifter", "phase_mode", "linearized or sinusoidal", &C::phase_mode),

      field("statistics", "n_modes", "effective modes; 0 = shift range / photon bandwidth", &C::n_modes),
      field("statistics", "photon_bandwidth_ghz", "single-photon bandwidth, 60 GHz", &C::photon_bandwidth_ghz),
      field("statistics", "mu", "mean pairs per mode per pulse", &C::mu),
      field("statistics", "eta_s", "signal arm efficiency (Klyshko 0.14)", &C::eta_s),
      field("statistics", "eta_h", "herald arm efficiency (Klyshko 0.11 to 0.15)", &C::eta_h),
      field("statistics", "pulses", "Monte Carlo pulses per point", &C::pulses),
      field("statistics", "mu_sweep", "comma-separated mu values for stats-sweep", &C::mu_sweep),

      field("hom", "g2_h", "heralded g2 at the interference power, 0.14", &C::g2_h),
      field("hom", "purity", "purity for the dip; 0 = compute the combined purity", &C::hom_purity),
      field("hom", "measured_visibility", "measured visibility, 0.61", &C::measured_visibility),
      field("hom", "measured_visibility_error", "its uncertainty, 0.04", &C::measured_visibility_error),
      field("hom", "delay_span_ps", "delay scan half-range", &C::delay_span_ps),
      field("hom", "delay_points", "delay samples", &C::delay_points),

      field("loss", "table", "CSV name,dB,arm; empty = built-in component list", &C::loss_table),
      field("loss", "klyshko_eta_s", "measured signal Klyshko efficiency, 0.14", &C::klyshko_eta_s),
      field("loss", "klyshko_eta_h_low", "measured herald Klyshko range, low end 0.11", &C::klyshko_eta_h_low),
      field("loss", "klyshko_eta_h_high", "measured herald Klyshko range, high end 0.15", &C::klyshko_eta_h_high),
      field("loss", "tolerance", "absolute tolerance on efficiency discrepancies", &C::loss_tolerance),

      field("feedforward", "pulses", "simulated pairs for joint spectra", &C::stream_pulses),
      field("feedforward", "histogram_bins", "bins per histogram axis", &C::histogram_bins),
      field("feedforward", "herald_sampling_halfwidth_ghz", "half-width of the sampled herald band", &C::herald_sampling_halfwidth_ghz),
      field("feedforward", "shifting", "apply the feed-forward shift", &C::shifting),
  };
  return fields;
}

void set_value(ScenarioConfig& cfg, const std::string& dotted_key, const std::string& value) {
  for (const auto& f : config_fields()) {
    if (f.section + "." + f.key == dotted_key) {
      f.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError(dotted_key + ": unknown key");
}

ScenarioConfig load_config(std::istream& in, ScenarioConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": key outside a [section]");
    for (const auto& [key, node] : body) {
      std::string value = node.data();
      // Trailing comments after the value.
      for (const char* mark : {" ;", " #", "\t;", "\t#"}) {
        const auto p = value.find(mark);
        if (p != std::string::npos) value = value.substr(0, p);
      }
      set_value(base, section + "." + key, value);
    }
  }
  return base;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return load_config(in, std::move(base));
}

void write_ini(std::ostream& out, const ScenarioConfig& cfg) {
  std::string section;
  for (const auto& f : config_fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << "; " << f.doc << '\n' << f.key << " = " << f.get(cfg) << '\n';
  }
}

std::map<std::string, std::map<std::string, std::string>> config_sections(const ScenarioConfig& cfg) {
  std::map<std::string, std::map<std::string, std::string>> m;
  for (const auto& f : config_fields()) m[f.section][f.key] = f.get(cfg);
  return m;
}

void validate(const ScenarioConfig& c) {
  const auto& names = scenario_names();
  require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "run.scenario",
          "unknown scenario '" + c.scenario + "'");
  require(c.grid_scale > 0.0 && c.grid_scale <= 8.0, "run.grid_scale", "must lie in (0, 8]");
  require(c.pump_wavelength_nm > 0.0, "source.pump_wavelength_nm", "must be positive");
  require(c.signal_wavelength_nm > c.pump_wavelength_nm, "source.signal_wavelength_nm",
          "must be longer than the pump wavelength");
  require(c.pump_sigma_ghz > 0.0, "source.pump_sigma_ghz", "must be positive");
  require(c.pump_sigma_convention == "amplitude_1e" || c.pump_sigma_convention == "amplitude_std" ||
              c.pump_sigma_convention == "intensity_fwhm",
          "source.pump_sigma_convention", "expected amplitude_1e, amplitude_std or intensity_fwhm");
  require(c.filter_width_ghz > 0.0, "source.filter_width_ghz", "must be positive");
  require(c.dispersion_ps_per_ghz != 0.0 && std::isfinite(c.dispersion_ps_per_ghz),
          "spectrometer.dispersion_ps_per_ghz", "must be non-zero");
  require(c.tdc_bin_ps > 0.0, "spectrometer.tdc_bin_ps", "must be positive");
  require(c.jitter_model == "gaussian" || c.jitter_model == "histogram" || c.jitter_model == "none",
          "spectrometer.jitter_model", "expected gaussian, histogram or none");
  require(c.jitter_frequency_std_ghz >= 0.0, "spectrometer.jitter_frequency_std_ghz", "must be >= 0");
  require(c.jitter_model != "histogram" || !c.jitter_histogram.empty(),
          "spectrometer.jitter_histogram", "required when jitter_model = histogram");
  require(c.calibrated_halfwidth_ghz > 0.0, "spectrometer.calibrated_halfwidth_ghz", "must be positive");
  require(c.herald_span_rad_per_s >= 0.0, "heralded.herald_span_rad_per_s", "must be >= 0");
  require(c.signal_points >= 3, "heralded.signal_points", "must be >= 3");
  require(c.herald_points >= 2, "heralded.herald_points", "must be >= 2");
  require(c.posterior_points >= 3, "heralded.posterior_points", "must be >= 3");
  require(c.posterior_sigmas > 0.0, "heralded.posterior_sigmas", "must be positive");
  require(c.fiber_length_m > 0.0, "gvd.fiber_length_m", "must be positive");
  require(c.gvd_wavelength_nm > 0.0, "gvd.wavelength_nm", "must be positive");
  require(c.v_pi > 0.0, "shifter.v_pi", "must be positive");
  require(c.nu_rf_ghz > 0.0, "shifter.nu_rf_ghz", "must be positive");
  require(c.shift_range_ghz >= 0.0, "shifter.shift_range_ghz", "must be >= 0");
  require(c.drive_jitter_ps >= 0.0, "shifter.drive_jitter_ps", "must be >= 0");
  require(c.phase_mode == "linearized" || c.phase_mode == "sinusoidal", "shifter.phase_mode",
          "expected linearized or sinusoidal");
  require(c.n_modes == 0.0 || c.n_modes >= 1.0, "statistics.n_modes", "must be 0 (auto) or >= 1");
  require(c.photon_bandwidth_ghz > 0.0, "statistics.photon_bandwidth_ghz", "must be positive");
  require(c.mu >= 0.0, "statistics.mu", "must be >= 0");
  require(c.eta_s >= 0.0 && c.eta_s <= 1.0, "statistics.eta_s", "must lie in [0, 1]");
  require(c.eta_h >= 0.0 && c.eta_h <= 1.0, "statistics.eta_h", "must lie in [0, 1]");
  require(c.pulses > 0, "statistics.pulses", "must be positive");
  require(c.g2_h >= 0.0, "hom.g2_h", "must be >= 0");
  require(c.hom_purity >= 0.0 && c.hom_purity <= 1.0, "hom.purity", "must lie in [0, 1]");
  require(c.delay_span_ps > 0.0, "hom.delay_span_ps", "must be positive");
  require(c.delay_points >= 2, "hom.delay_points", "must be >= 2");
  require(c.klyshko_eta_h_low <= c.klyshko_eta_h_high, "loss.klyshko_eta_h_low",
          "must not exceed klyshko_eta_h_high");
  require(c.loss_tolerance >= 0.0, "loss.tolerance", "must be >= 0");
  require(c.stream_pulses > 0, "feedforward.pulses", "must be positive");
  require(c.histogram_bins >= 2, "feedforward.histogram_bins", "must be >= 2");
  require(c.herald_sampling_halfwidth_ghz > 0.0 &&
              c.herald_sampling_halfwidth_ghz < c.calibrated_halfwidth_ghz,
          "feedforward.herald_sampling_halfwidth_ghz",
          "must be positive and inside the calibrated spectrometer range");
  (void)mu_sweep_values(c);
  // Remaining module preconditions.
  try {
    (void)heralded_model(c, {});
    (void)shifter(c);
    statistics_model(c, true).validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : config_fields()) {
    if (!f.affects_results) continue;
    const std::string line = f.section + "." + f.key + "=" + f.get(cfg) + "\n";
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double signal_center(const ScenarioConfig& cfg) {
  return units::wavelength_to_angular(cfg.signal_wavelength_nm * 1e-9);
}

double pump_center(const ScenarioConfig& cfg) {
  return units::wavelength_to_angular(cfg.pump_wavelength_nm * 1e-9);
}

spectral::PumpEnvelope pump(const ScenarioConfig& cfg) {
  const double s = units::ghz_to_rad_per_s(cfg.pump_sigma_ghz);
  if (cfg.pump_sigma_convention == "intensity_fwhm") {
    return spectral::PumpEnvelope::from_intensity_fwhm(s, pump_center(cfg));
  }
  if (cfg.pump_sigma_convention == "amplitude_std") return {s, pump_center(cfg)};
  return {s / std::numbers::sqrt2, pump_center(cfg)};
}

spectrometer::JitterDistribution jitter(const ScenarioConfig& cfg) {
  if (cfg.jitter_model == "none") return spectrometer::JitterDistribution::gaussian(0.0);
  if (cfg.jitter_model == "histogram") {
    return spectrometer::load_jitter_histogram_file(cfg.jitter_histogram);
  }
  return spectrometer::JitterDistribution::gaussian(
      units::ps_to_s(cfg.jitter_frequency_std_ghz * std::abs(cfg.dispersion_ps_per_ghz)));
}

spectrometer::SpectrometerModel spectrometer_model(const ScenarioConfig& cfg) {
  return spectrometer::SpectrometerModel::from_lab_units(
      cfg.dispersion_ps_per_ghz, cfg.tdc_bin_ps, jitter(cfg), pump_center(cfg) - signal_center(cfg),
      units::ghz_to_rad_per_s(cfg.calibrated_halfwidth_ghz));
}

serrodyne::ShifterModel shifter(const ScenarioConfig& cfg) {
  return serrodyne::ShifterModel::from_shift_range(cfg.v_pi, cfg.nu_rf_ghz * units::kGiga,
                                                   cfg.shift_range_ghz * units::kGiga,
                                                   units::ps_to_s(cfg.drive_jitter_ps));
}

double gvd(const ScenarioConfig& cfg) {
  return heralded::gvd_parameter(cfg.fiber_dispersion_ps_nm_km, cfg.fiber_length_m,
                                 cfg.gvd_wavelength_nm * 1e-9);
}

heralded::HeraldedStateModel heralded_model(const ScenarioConfig& cfg, PurityEffects effects) {
  heralded::HeraldedStateModel m(pump(cfg), signal_center(cfg),
                                 units::ghz_to_rad_per_s(cfg.filter_width_ghz));
  m.gvd = effects.dispersion ? gvd(cfg) : 0.0;
  if (effects.jitter) m.spectrometer = spectrometer_model(cfg);
  m.herald_span = cfg.herald_span_rad_per_s;
  m.shift_range = units::ghz_to_rad_per_s(cfg.shift_range_ghz);
  m.quadrature.signal_points = scaled_points(cfg.signal_points, cfg.grid_scale, 5);
  m.quadrature.herald_points = scaled_points(cfg.herald_points, cfg.grid_scale, 5);
  m.quadrature.posterior_points = scaled_points(cfg.posterior_points, cfg.grid_scale, 9);
  m.quadrature.posterior_sigmas = cfg.posterior_sigmas;
  m.quadrature.workers = cfg.workers;
  m.validate();
  return m;
}

double mode_count(const ScenarioConfig& cfg) {
  return cfg.n_modes > 0.0 ? cfg.n_modes
                           : stats::effective_mode_count(cfg.shift_range_ghz, cfg.photon_bandwidth_ghz);
}

stats::MultiplexedStatisticsModel statistics_model(const ScenarioConfig& cfg, bool multiplexed) {
  stats::MultiplexedStatisticsModel m;
  m.n_modes = multiplexed ? std::max(1.0, mode_count(cfg)) : 1.0;
  m.mu = cfg.mu;
  m.eta_s = cfg.eta_s;
  m.eta_h = cfg.eta_h;
  m.multiplexing_enabled = multiplexed;
  return m;
}

std::vector<double> mu_sweep_values(const ScenarioConfig& cfg) {
  std::vector<double> v;
  std::stringstream ss(cfg.mu_sweep);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const double mu = from_text<double>("statistics.mu_sweep", t);
    require(mu >= 0.0, "statistics.mu_sweep", "values must be >= 0");
    v.push_back(mu);
  }
  require(!v.empty(), "statistics.mu_sweep", "needs at least one value");
  return v;
}

loss::LossTable default_loss_table() {
  using loss::Arm;
  return loss::LossTable({
      {"SNSPD", 0.81, Arm::kBoth},
      {"Fibre coupling (herald)", 3.0, Arm::kHerald},
      {"Fibre coupling (signal)", 1.5, Arm::kSignal},
      {"Delay line insertion", 0.18, Arm::kSignal},
      {"Phase modulator insertion", 2.2, Arm::kSignal},
      {"FBG insertion (TOF)", 4.6, Arm::kHerald},
      {"Signal filter insertion", 0.46, Arm::kSignal},
      {"KTP chip", 0.82, Arm::kBoth},
      {"Signal filter (photon to filter bandwidth)", 3.0, Arm::kSignal},
  });
}

loss::LossTable loss_table(const ScenarioConfig& cfg) {
  if (cfg.loss_table.empty()) return default_loss_table();
  return loss::load_loss_table_file(cfg.loss_table);
}

}  // namespace freqmux::harness
