#include "freqmux/harness/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "freqmux/errors.hpp"
#include "freqmux/harness/feedforward.hpp"
#include "freqmux/heralded_state.hpp"
#include "freqmux/kernels.hpp"
#include "freqmux/loss_budget.hpp"
#include "freqmux/serrodyne.hpp"
#include "freqmux/statistics.hpp"
#include "freqmux/units.hpp"
#include "freqmux/version.hpp"

namespace freqmux::harness {
namespace fs = std::filesystem;
namespace {

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

class Run {
 public:
  Run(const ScenarioConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log) {
    summary_.scenario = cfg.scenario;
    summary_.config_hash = config_hash(cfg);
    fs::create_directories(cfg.output_dir);
  }

  std::ofstream open(const std::string& name) {
    summary_.files.push_back(name);
    std::ofstream out(fs::path(cfg_.output_dir) / name);
    if (!out) throw Error("cannot write " + name);
    out.precision(12);
    return out;
  }

  void value(const std::string& key, const std::string& v) {
    summary_.values.emplace_back(key, v);
    progress(key + " = " + v);
  }
  void value(const std::string& key, double v) { value(key, num(v)); }

  void check(const std::string& name, double v, double lo, double hi) {
    summary_.checks.push_back({name, v, lo, hi, v >= lo && v <= hi});
  }

  void progress(const std::string& line) const {
    if (log_ && cfg_.verbosity >= 2) *log_ << "  " << line << '\n';
  }

  const ScenarioConfig& cfg() const { return cfg_; }
  ScenarioSummary& summary() { return summary_; }

 private:
  const ScenarioConfig& cfg_;
  std::ostream* log_;
  ScenarioSummary summary_;
};

void purity_jitter(Run& run) {
  const auto& cfg = run.cfg();
  const auto model = heralded_model(cfg, {true, false});
  const double p = heralded::purity_integral(model, {cfg.check_refinement, 1e-3});
  run.value("purity", p);
  run.value("herald_frequency_uncertainty_ghz",
            units::rad_per_s_to_ghz(model.spectrometer->frequency_uncertainty()));
  run.check("purity jitter-only", p, 0.90, 0.94);
  if (cfg.jitter_model != "gaussian") return;
  auto out = run.open("purity_sweep.csv");
  out << "jitter_frequency_std_ghz,purity\n";
  for (double f : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
    ScenarioConfig c = cfg;
    c.jitter_frequency_std_ghz = cfg.jitter_frequency_std_ghz * f;
    out << c.jitter_frequency_std_ghz << ',' << heralded::purity_integral(heralded_model(c, {true, false}))
        << '\n';
  }
}

void purity_gvd(Run& run) {
  const auto& cfg = run.cfg();
  const auto model = heralded_model(cfg, {false, true});
  const double p = heralded::purity_integral(model, {cfg.check_refinement, 1e-3});
  run.value("gamma_s2", model.gvd);
  run.value("purity", p);
  run.check("purity gvd-only", p, 0.93, 0.97);
  auto out = run.open("purity_sweep.csv");
  out << "gamma_s2,purity\n";
  for (double f : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
    auto m = model;
    m.gvd = model.gvd * f;
    out << m.gvd << ',' << heralded::purity_integral(m) << '\n';
  }
}

void purity_combined(Run& run) {
  const auto& cfg = run.cfg();
  const auto model = heralded_model(cfg, {true, true});
  const double p = heralded::purity_integral(model, {cfg.check_refinement, 1e-3});
  run.value("purity", p);
  run.check("purity combined", p, 0.82, 0.86);

  const auto rho = heralded::assemble_density_matrix(model);
  run.value("density_trace", rho.trace());
  run.value("density_eigen_purity", rho.eigen_purity());
  {
    auto out = run.open("density_matrix.txt");
    rho.write(out);
  }

  // Drive-phase jitter on an otherwise pure photon at the largest shift.
  const auto sh = shifter(cfg);
  const double sigma = model.pump.sigma;
  const double pj = serrodyne::phase_jitter_purity(sh.sigma_jitter, sigma, sh.max_shift(), sh);
  run.value("phase_jitter_purity", pj);
  run.check("phase jitter purity", pj, 0.95, 1.0);
  auto out = run.open("phase_jitter_sweep.csv");
  out << "sigma_jitter_ps,purity\n";
  for (double ps : {0.0, 2.5, 5.0, 5.3, 7.5, 10.0, 12.5, 15.0}) {
    out << ps << ',' << serrodyne::phase_jitter_purity(units::ps_to_s(ps), sigma, sh.max_shift(), sh)
        << '\n';
  }
}

void stats_sweep(Run& run) {
  const auto& cfg = run.cfg();
  const CounterRng root(cfg.seed);
  auto out = run.open("stats_sweep.csv");
  out << "kind,";
  stats::write_counting_header(out);
  std::uint64_t stream = 0;
  std::vector<double> single, multi, ratio, g2_single, g2_multi;
  for (double mu : mu_sweep_values(cfg)) {
    ScenarioConfig c = cfg;
    c.mu = mu;
    for (bool mux : {false, true}) {
      const auto model = statistics_model(c, mux);
      const auto mc = stats::monte_carlo_counting(model, cfg.pulses, root.split(stream++), cfg.workers);
      out << "monte_carlo,";
      stats::write_counting_row(out, run.summary().config_hash, model, mc);
      if (model.mu * model.n_modes < 0.1) {
        out << "analytic,";
        stats::write_counting_row(out, run.summary().config_hash, model, stats::analytic_counting(model));
      }
      (mux ? multi : single).push_back(mc.p_sh.value);
      (mux ? g2_multi : g2_single).push_back(mc.g2_h.value);
    }
    ratio.push_back(single.back() > 0.0 ? multi.back() / single.back() : 0.0);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < single.size(); ++i) {
    monotone = monotone && single[i] > single[i - 1] && multi[i] > multi[i - 1];
  }
  run.value("effective_modes", mode_count(cfg));
  run.value("enhancement_last", ratio.back());
  run.value("g2_single_last", g2_single.back());
  run.value("g2_multiplexed_last", g2_multi.back());
  run.check("P(S,H) increases with mu", monotone ? 1.0 : 0.0, 1.0, 1.0);
  run.check("multiplexing enhancement", ratio.back(), 2.2, 3.4);
}

void joint_spectrum(Run& run) {
  const auto& cfg = run.cfg();
  const auto setup = feedforward_setup(cfg);
  const auto r = simulate_feedforward_stream(setup, cfg.stream_pulses, CounterRng(cfg.seed));
  run.value("r_unshifted", r.r_unshifted);
  run.value("r_shifted", r.r_shifted);
  run.value("in_range_fraction", static_cast<double>(r.in_range) / static_cast<double>(cfg.stream_pulses));
  run.value("pass_fraction", static_cast<double>(r.passed) / static_cast<double>(cfg.stream_pulses));
  run.check("unshifted anticorrelation", r.r_unshifted, -1.0, -0.9);
  if (cfg.shifting) run.check("shifted independence", r.r_shifted, -0.2, 0.2);
  {
    auto out = run.open("joint_unshifted.txt");
    r.unshifted.write(out);
  }
  {
    auto out = run.open("joint_shifted.txt");
    r.shifted.write(out);
  }
  auto out = run.open("events.csv");
  write_events(out, r.events);
}

void hom_dip(Run& run) {
  const auto& cfg = run.cfg();
  double purity = cfg.hom_purity;
  if (purity <= 0.0) purity = heralded::purity_integral(heralded_model(cfg, {true, true}));
  const double v = stats::hom_visibility(purity, cfg.g2_h);
  run.value("purity", purity);
  run.value("g2_h", cfg.g2_h);
  run.value("visibility_model", v);
  run.value("visibility_measured", cfg.measured_visibility);
  run.value("visibility_gap", v - cfg.measured_visibility);
  run.value("model_nonclassical", stats::is_nonclassical(v) ? "yes" : "no");
  run.value("measured_nonclassical", stats::is_nonclassical(cfg.measured_visibility) ? "yes" : "no");
  run.check("model visibility above classical bound", v, 0.5, 1.0);
  std::vector<double> delays(static_cast<std::size_t>(cfg.delay_points));
  for (std::size_t i = 0; i < delays.size(); ++i) {
    delays[i] = units::ps_to_s(-cfg.delay_span_ps +
                               2.0 * cfg.delay_span_ps * static_cast<double>(i) /
                                   static_cast<double>(delays.size() - 1));
  }
  const auto rate = stats::hom_dip_curve(purity, cfg.g2_h, pump(cfg).sigma, delays);
  auto out = run.open("hom_dip.csv");
  out << "delay_ps,coincidence_rate\n";
  for (std::size_t i = 0; i < delays.size(); ++i) out << units::s_to_ps(delays[i]) << ',' << rate[i] << '\n';
}

void loss_budget(Run& run) {
  const auto& cfg = run.cfg();
  const auto table = loss_table(cfg);
  const double es = loss::arm_efficiency(table, loss::Arm::kSignal);
  const double eh = loss::arm_efficiency(table, loss::Arm::kHerald);
  run.value("eta_signal", es);
  run.value("eta_herald", eh);
  run.check("signal efficiency", es, 0.125, 0.135);
  run.check("herald efficiency", eh, 0.115, 0.125);
  loss::ReconcileOptions opt;
  opt.tolerance = cfg.loss_tolerance;
  opt.herald_interval = std::make_pair(cfg.klyshko_eta_h_low, cfg.klyshko_eta_h_high);
  const auto report = loss::reconcile(table, cfg.klyshko_eta_s,
                                      0.5 * (cfg.klyshko_eta_h_low + cfg.klyshko_eta_h_high), opt);
  auto out = run.open("loss_report.txt");
  report.write(out);
  run.value("signal_discrepancy", report.signal.absolute);
  run.value("herald_in_interval", report.herald.within_interval ? "yes" : "no");
}

void lut_dump(Run& run) {
  const auto& cfg = run.cfg();
  const auto sp = spectrometer_model(cfg);
  const auto sh = shifter(cfg);
  const auto lut = serrodyne::build_lut(sp, pump_center(cfg), signal_center(cfg), sh);
  {
    auto out = run.open("lut.csv");
    lut.write(out);
  }
  const double hc = pump_center(cfg) - signal_center(cfg);
  std::size_t inner = 0, inner_ok = 0;
  for (const auto& e : lut.entries()) {
    if (std::abs(e.herald_frequency - hc) <= units::kTwoPi * sh.max_shift()) {
      ++inner;
      inner_ok += e.in_range;
    }
  }
  run.value("bins", static_cast<double>(lut.entries().size()));
  run.value("in_range_bins", static_cast<double>(lut.in_range_count()));
  run.value("v0_max", sh.v0_max);
  run.check("bins within shift range mapped", inner ? static_cast<double>(inner_ok) / inner : 0.0,
            1.0, 1.0);
}

}  // namespace

bool ScenarioSummary::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void ScenarioSummary::write(std::ostream& out) const {
  out << "scenario " << scenario << " (config " << config_hash << ")\n";
  for (const auto& [k, v] : values) out << "  " << k << " = " << v << '\n';
  for (const auto& c : checks) {
    out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << num(c.value)
        << " in [" << num(c.lo) << ", " << num(c.hi) << "]\n";
  }
  out << "  wall time " << num(wall_time_s, 3) << " s\n";
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

ScenarioSummary run_scenario(const ScenarioConfig& cfg, std::ostream* log) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  Run run(cfg, log);
  static const std::map<std::string, std::function<void(Run&)>> table{
      {"purity-jitter", purity_jitter}, {"purity-gvd", purity_gvd},
      {"purity-combined", purity_combined}, {"stats-sweep", stats_sweep},
      {"joint-spectrum", joint_spectrum}, {"hom-dip", hom_dip},
      {"loss-budget", loss_budget}, {"lut-dump", lut_dump}};
  table.at(cfg.scenario)(run);
  auto summary = run.summary();
  summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(cfg.output_dir);
  {
    std::ofstream out(dir / "summary.txt");
    summary.write(out);
  }
  nlohmann::ordered_json m;
  m["tool"] = "freqmux";
  m["version"] = kVersion;
  m["scenario"] = cfg.scenario;
  m["seed"] = cfg.seed;
  m["config_hash"] = summary.config_hash;
  m["simd_backend"] = std::string(simd::backend_name(simd::active_backend()));
  m["wall_time_s"] = summary.wall_time_s;
  for (const auto& [section, keys] : config_sections(cfg)) {
    for (const auto& [k, v] : keys) m["config"][section][k] = v;
  }
  m["outputs"] = nlohmann::json::array();
  for (const auto& f : summary.files) {
    m["outputs"].push_back({{"file", f}, {"fnv1a", file_hash((dir / f).string())}});
  }
  for (const auto& [k, v] : summary.values) m["summary"][k] = v;
  for (const auto& c : summary.checks) {
    m["checks"].push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi},
                           {"passed", c.passed}});
  }
  std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
  if (log && cfg.verbosity >= 1) summary.write(*log);
  return summary;
}

ScenarioConfig config_from_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("manifest: cannot open " + path);
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!m.contains("config") || !m["config"].is_object()) throw ConfigError("manifest: no config object");
  ScenarioConfig cfg;
  for (const auto& [section, keys] : m["config"].items()) {
    for (const auto& [k, v] : keys.items()) set_value(cfg, section + "." + k, v.get<std::string>());
  }
  return cfg;
}

}  // namespace freqmux::harness
