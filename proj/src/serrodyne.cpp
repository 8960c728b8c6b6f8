#include "freqmux/serrodyne.hpp"

#include <cmath>
#include <ostream>

#include "freqmux/errors.hpp"
#include "freqmux/kernels.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/units.hpp"

namespace freqmux::serrodyne {
namespace {

constexpr double kPi = std::numbers::pi;
// Slack on the overdrive / range test for values produced by round trips.
constexpr double kRangeSlack = 1e-12;

}  // namespace

ShifterModel::ShifterModel(double v_pi_, double nu_rf_, double v0_max_, double sigma_jitter_)
    : v_pi(v_pi_), nu_rf(nu_rf_), v0_max(v0_max_), sigma_jitter(sigma_jitter_) {
  if (!(v_pi > 0.0)) throw DomainError("ShifterModel: v_pi must be positive");
  if (!(nu_rf > 0.0)) throw DomainError("ShifterModel: nu_rf must be positive");
  if (!(v0_max >= 0.0)) throw DomainError("ShifterModel: v0_max must be >= 0");
  if (!(sigma_jitter >= 0.0)) throw DomainError("ShifterModel: jitter must be >= 0");
}

ShifterModel ShifterModel::from_shift_range(double v_pi, double nu_rf, double total_range_hz,
                                            double sigma_jitter) {
  if (!(total_range_hz >= 0.0)) throw DomainError("shift range must be >= 0");
  return {v_pi, nu_rf, 0.5 * total_range_hz * v_pi / (kPi * nu_rf), sigma_jitter};
}

double ShifterModel::max_shift() const { return kPi * (v0_max / v_pi) * nu_rf; }

double shift_magnitude(double v0, const ShifterModel& model) {
  if (std::abs(v0) > model.v0_max * (1.0 + kRangeSlack)) {
    throw OverdriveError("drive amplitude exceeds v0_max");
  }
  return kPi * (v0 / model.v_pi) * model.nu_rf;
}

double drive_voltage(double shift_hz, const ShifterModel& model) {
  const double v0 = shift_hz * model.v_pi / (kPi * model.nu_rf);
  if (std::abs(v0) > model.v0_max * (1.0 + kRangeSlack)) {
    throw OverdriveError("requested shift exceeds the modulator range");
  }
  return v0;
}

FeedForwardLUT::FeedForwardLUT(std::int64_t first_bin, std::vector<LutEntry> entries)
    : first_bin_(first_bin), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].bin != first_bin_ + static_cast<std::int64_t>(i)) {
      throw DomainError("FeedForwardLUT: entries must cover consecutive bins");
    }
  }
}

const LutEntry* FeedForwardLUT::find(std::int64_t bin) const {
  if (bin < first_bin_ || bin > last_bin()) return nullptr;
  return &entries_[static_cast<std::size_t>(bin - first_bin_)];
}

std::size_t FeedForwardLUT::in_range_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.in_range ? 1 : 0;
  return n;
}

void FeedForwardLUT::write(std::ostream& out) const {
  out << "bin,herald_frequency_ghz,v0_volts,in_range\n";
  const auto old = out.precision(12);
  for (const auto& e : entries_) {
    out << e.bin << ',' << units::rad_per_s_to_ghz(e.herald_frequency) << ',' << e.v0 << ','
        << (e.in_range ? 1 : 0) << '\n';
  }
  out.precision(old);
}

double required_shift(double herald_frequency, double pump_center, double target) {
  return units::rad_per_s_to_hz(target - (pump_center - herald_frequency));
}

FeedForwardLUT build_lut(const spectrometer::SpectrometerModel& spectrometer, double pump_center,
                         double target, const ShifterModel& model) {
  const double ref = spectrometer.reference_frequency();
  const double half = spectrometer.calibrated_halfwidth();
  std::int64_t a = spectrometer.frequency_to_bin(ref - half);
  std::int64_t b = spectrometer.frequency_to_bin(ref + half);
  if (a > b) std::swap(a, b);
  const double max_shift = model.max_shift();
  std::vector<LutEntry> entries;
  for (std::int64_t k = a; k <= b; ++k) {
    const double wh = spectrometer.bin_frequency(k);
    const double shift = required_shift(wh, pump_center, target);
    const bool in_range = std::abs(shift) <= max_shift * (1.0 + kRangeSlack);
    double v0 = shift * model.v_pi / (kPi * model.nu_rf);
    v0 = std::clamp(v0, -model.v0_max, model.v0_max);
    entries.push_back({k, wh, shift, v0, 0.0, in_range});
  }
  return {a, std::move(entries)};
}

double TemporalWavepacket::norm_sq() const {
  double s = 0.0;
  for (const auto& z : samples) s += std::norm(z);
  return s * dt;
}

TemporalWavepacket gaussian_pulse(double spectral_sigma, double t_center, std::size_t points,
                                  double half_width_sigmas) {
  if (!(spectral_sigma > 0.0)) throw DomainError("gaussian_pulse: bandwidth must be positive");
  if (points < 2) throw DomainError("gaussian_pulse: need at least two samples");
  const double tau = 1.0 / spectral_sigma;
  const double half = half_width_sigmas * tau;
  TemporalWavepacket w{t_center - half, 2.0 * half / static_cast<double>(points - 1), {}};
  w.samples.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = (w.time(k) - t_center) * spectral_sigma;
    w.samples[k] = std::exp(-0.5 * x * x);
  }
  return w;
}

TemporalWavepacket apply_temporal_phase(const TemporalWavepacket& wavepacket, double v0,
                                        double drive_phase, const ShifterModel& model,
                                        PhaseMode mode) {
  const double dnu = shift_magnitude(v0, model);
  const double w_rf = units::kTwoPi * model.nu_rf;
  const double t_lock = drive_phase / w_rf;
  TemporalWavepacket out = wavepacket;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const double t = out.time(k) - t_lock;
    const double phi = mode == PhaseMode::kSinusoidal ? (dnu / model.nu_rf) * std::sin(w_rf * t)
                                                      : units::kTwoPi * dnu * t;
    out.samples[k] *= std::polar(1.0, phi);
  }
  return out;
}

std::vector<std::complex<double>> spectrum(const TemporalWavepacket& wavepacket,
                                           const std::vector<double>& omegas) {
  std::vector<std::complex<double>> s(omegas.size());
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < wavepacket.samples.size(); ++k) {
      acc += wavepacket.samples[k] * std::polar(1.0, -omegas[j] * wavepacket.time(k));
    }
    s[j] = acc * wavepacket.dt;
  }
  return s;
}

double intensity_overlap(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size()) throw DomainError("intensity_overlap: size mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ia = std::norm(a[i]);
    const double ib = std::norm(b[i]);
    ab += ia * ib;
    aa += ia * ia;
    bb += ib * ib;
  }
  if (!(aa > 0.0 && bb > 0.0)) throw ZeroOverlapError("intensity_overlap: empty spectrum");
  return ab / std::sqrt(aa * bb);
}

namespace {

double jitter_purity_once(double sigma_jitter, double photon_sigma, double shift_hz,
                          const ShifterModel& model, std::size_t nodes, std::size_t time_points,
                          double half_width_sigmas) {
  const auto rule = numerics::gaussian_expectation_rule(nodes, sigma_jitter);
  const double half = half_width_sigmas / photon_sigma;
  const double dt = 2.0 * half / static_cast<double>(time_points - 1);
  const auto tw = numerics::trapezoid_weights(time_points, dt);
  const double beta = shift_hz / model.nu_rf;
  const double w_rf = units::kTwoPi * model.nu_rf;

  // Envelope norm is independent of x; fold sqrt(weight) / norm into rows.
  std::vector<double> env(time_points);
  double norm = 0.0;
  for (std::size_t k = 0; k < time_points; ++k) {
    const double t = -half + static_cast<double>(k) * dt;
    const double x = t * photon_sigma;
    env[k] = std::exp(-0.5 * x * x);
    norm += tw[k] * env[k] * env[k];
  }
  simd::ComplexRows rows(rule.nodes.size(), time_points);
  for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
    double* re = rows.row_re(r);
    double* im = rows.row_im(r);
    for (std::size_t k = 0; k < time_points; ++k) {
      const double t = -half + static_cast<double>(k) * dt;
      const double amp = env[k] * std::sqrt(tw[k] / norm);
      const double phi = beta * std::sin(w_rf * (t + rule.nodes[r]));
      re[k] = amp * std::cos(phi);
      im[k] = amp * std::sin(phi);
    }
  }
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
    terms[r] = rule.weights[r] *
               simd::weighted_overlap_sum(rows.row(r), rows, 0, rows.rows(), rule.weights);
  }
  return numerics::pairwise_sum(terms);
}

}  // namespace

double phase_jitter_purity(double sigma_jitter, double photon_sigma, double shift_hz,
                           const ShifterModel& model, const PhaseJitterOptions& options) {
  if (!(sigma_jitter >= 0.0)) throw DomainError("phase_jitter_purity: jitter must be >= 0");
  if (!(photon_sigma > 0.0)) throw DomainError("phase_jitter_purity: bandwidth must be positive");
  if (options.hermite_nodes < 1 || options.time_points < 3) {
    throw DomainError("phase_jitter_purity: quadrature too small");
  }
  if (sigma_jitter == 0.0 || shift_hz == 0.0) return 1.0;
  const double p = jitter_purity_once(sigma_jitter, photon_sigma, shift_hz, model,
                                      options.hermite_nodes, options.time_points,
                                      options.time_half_width_sigmas);
  if (options.check_refinement) {
    const double fine = jitter_purity_once(sigma_jitter, photon_sigma, shift_hz, model,
                                           options.hermite_nodes + options.hermite_nodes / 2,
                                           2 * options.time_points - 1,
                                           options.time_half_width_sigmas);
    if (std::abs(fine - p) > options.refinement_tolerance) {
      throw ConvergenceError("phase_jitter_purity: quadrature not converged", std::abs(fine - p));
    }
  }
  return p;
}

}  // namespace freqmux::serrodyne
