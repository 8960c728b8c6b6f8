#include "freqmux/harness/feedforward.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/units.hpp"

namespace freqmux::harness {
namespace {

constexpr std::uint64_t kBlockPulses = 4096;

}  // namespace

Histogram2D::Histogram2D(double x_lo, double x_hi, double y_lo, double y_hi, int bins)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), bins_(bins),
      counts_(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo) || bins < 1) throw DomainError("Histogram2D: bad axes");
}

void Histogram2D::add(double x, double y) {
  if (x < x_lo_ || x >= x_hi_ || y < y_lo_ || y >= y_hi_) return;
  const int ix = std::min(bins_ - 1, static_cast<int>((x - x_lo_) / (x_hi_ - x_lo_) * bins_));
  const int iy = std::min(bins_ - 1, static_cast<int>((y - y_lo_) / (y_hi_ - y_lo_) * bins_));
  ++counts_[static_cast<std::size_t>(iy * bins_ + ix)];
}

std::uint64_t Histogram2D::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

void Histogram2D::write(std::ostream& out) const {
  out << "# x_lo " << x_lo_ << " x_hi " << x_hi_ << " y_lo " << y_lo_ << " y_hi " << y_hi_
      << " bins " << bins_ << '\n';
  for (int iy = 0; iy < bins_; ++iy) {
    for (int ix = 0; ix < bins_; ++ix) out << (ix ? "," : "") << count(ix, iy);
    out << '\n';
  }
}

FeedforwardSetup feedforward_setup(const ScenarioConfig& cfg) {
  const auto sp = spectrometer_model(cfg);
  const auto sh = shifter(cfg);
  const double wc = signal_center(cfg);
  return FeedforwardSetup{pump(cfg),
                          wc,
                          units::ghz_to_rad_per_s(cfg.filter_width_ghz),
                          sp,
                          sh,
                          serrodyne::build_lut(sp, pump_center(cfg), wc, sh),
                          cfg.phase_mode == "sinusoidal" ? serrodyne::PhaseMode::kSinusoidal
                                                         : serrodyne::PhaseMode::kLinearized,
                          cfg.shifting,
                          units::ghz_to_rad_per_s(cfg.herald_sampling_halfwidth_ghz),
                          cfg.eta_s,
                          cfg.eta_h,
                          cfg.histogram_bins,
                          cfg.workers};
}

FeedforwardResult simulate_feedforward_stream(const FeedforwardSetup& s, std::uint64_t pulses,
                                              const CounterRng& rng) {
  const double hc = s.pump.center - s.filter_center;
  // Joint intensity |pump(ws + wi)|^2 has std-dev sigma / sqrt 2 across the ridge.
  const double ridge_sigma = s.pump.sigma / std::numbers::sqrt2;
  const double w_rf = units::kTwoPi * s.shifter.nu_rf;
  std::vector<EventRecord> events(pulses);
  const std::uint64_t blocks = (pulses + kBlockPulses - 1) / kBlockPulses;

  numerics::parallel_for(blocks, s.workers == 0 ? numerics::default_workers() : s.workers,
                         [&](std::size_t b) {
    CounterRng local = rng.split(b);
    std::uniform_real_distribution<double> herald_dist(hc - s.herald_halfwidth, hc + s.herald_halfwidth);
    std::normal_distribution<double> ridge(0.0, ridge_sigma);
    std::normal_distribution<double> drive_jitter(0.0, 1.0);
    std::bernoulli_distribution herald_detect(s.eta_h), signal_detect(s.eta_s);
    const std::uint64_t begin = b * kBlockPulses;
    const std::uint64_t end = std::min<std::uint64_t>(pulses, begin + kBlockPulses);
    for (std::uint64_t p = begin; p < end; ++p) {
      EventRecord e{};
      e.pulse = p;
      e.omega_i = herald_dist(local);
      e.omega_s = s.pump.center - e.omega_i + ridge(local);
      const auto outcome = s.spectrometer.sample_herald_event(e.omega_i, local);
      e.herald_bin = outcome.time_bin_index;
      e.omega_h = outcome.inferred_frequency;
      const double x = s.shifter.sigma_jitter * drive_jitter(local);
      const auto* entry = s.lut.find(e.herald_bin);
      e.in_range = entry != nullptr && entry->in_range;
      e.omega_out = e.omega_s;
      if (s.shifting && e.in_range) {
        e.shift_hz = serrodyne::shift_magnitude(entry->v0, s.shifter);
        // Instantaneous frequency of the drive at the (jittered) lock point.
        const double factor = s.mode == serrodyne::PhaseMode::kSinusoidal ? std::cos(w_rf * x) : 1.0;
        e.omega_out += units::kTwoPi * e.shift_hz * factor;
      }
      e.passed = (!s.shifting || e.in_range) &&
                 std::abs(e.omega_out - s.filter_center) <= 0.5 * s.filter_width;
      e.herald_click = herald_detect(local);
      e.signal_click = e.passed && signal_detect(local);
      events[p] = e;
    }
  });

  const double half_ghz = units::rad_per_s_to_ghz(s.herald_halfwidth);
  FeedforwardResult r{std::move(events),
                      Histogram2D(-half_ghz, half_ghz, -half_ghz, half_ghz, s.histogram_bins),
                      Histogram2D(-half_ghz, half_ghz, -half_ghz, half_ghz, s.histogram_bins),
                      0.0, 0.0};
  std::vector<double> hx, sy, fx, fy;
  hx.reserve(pulses);
  sy.reserve(pulses);
  for (const auto& e : r.events) {
    const double h = units::rad_per_s_to_ghz(e.omega_h - hc);
    const double sg = units::rad_per_s_to_ghz(e.omega_s - s.filter_center);
    r.unshifted.add(h, sg);
    hx.push_back(h);
    sy.push_back(sg);
    r.in_range += e.in_range;
    if (e.passed) {
      ++r.passed;
      const double out = units::rad_per_s_to_ghz(e.omega_out - s.filter_center);
      r.shifted.add(h, out);
      fx.push_back(h);
      fy.push_back(out);
    }
  }
  r.r_unshifted = hx.size() > 1 ? numerics::pearson(hx, sy) : 0.0;
  r.r_shifted = fx.size() > 1 ? numerics::pearson(fx, fy) : 0.0;
  return r;
}

void write_events(std::ostream& out, const std::vector<EventRecord>& events) {
  out << "pulse,omega_s_ghz,omega_i_ghz,herald_bin,omega_h_ghz,shift_ghz,in_range,omega_out_ghz,"
         "passed,herald_click,signal_click\n";
  const auto old = out.precision(12);
  for (const auto& e : events) {
    out << e.pulse << ',' << units::rad_per_s_to_ghz(e.omega_s) << ','
        << units::rad_per_s_to_ghz(e.omega_i) << ',' << e.herald_bin << ','
        << units::rad_per_s_to_ghz(e.omega_h) << ',' << e.shift_hz * 1e-9 << ',' << e.in_range
        << ',' << units::rad_per_s_to_ghz(e.omega_out) << ',' << e.passed << ','
        << e.herald_click << ',' << e.signal_click << '\n';
  }
  out.precision(old);
}

}  // namespace freqmux::harness
