#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/rng.hpp"
#include "freqmux/serrodyne.hpp"
#include "freqmux/spectrometer.hpp"
#include "freqmux/units.hpp"

using namespace freqmux;
using namespace freqmux::serrodyne;

namespace {

const double kPump = units::wavelength_to_angular(775e-9);
const double kSignal = units::wavelength_to_angular(1535e-9);
const double kHeraldRef = kPump - kSignal;
const double kPhotonSigma = units::ghz_to_rad_per_s(50.95) / std::sqrt(2.0);

ShifterModel default_shifter(double jitter_ps = 0.0) {
  return ShifterModel::from_shift_range(4.0, 8e9, 170e9, units::ps_to_s(jitter_ps));
}

spectrometer::SpectrometerModel default_spectrometer() {
  return spectrometer::SpectrometerModel::from_lab_units(
      16.0, 33.0, spectrometer::JitterDistribution::gaussian(units::ps_to_s(160.0)), kHeraldRef,
      units::ghz_to_rad_per_s(500.0));
}

// Tr(rho^2) for a Gaussian pulse under sinusoidal phase with Gaussian timing
// offset, by brute-force double integral over both offsets.
double jitter_purity_oracle(double sigma_x, double photon_sigma, double shift_hz, double nu_rf) {
  const int nx = 121, nt = 401;
  const double xr = 6.0 * sigma_x, tr = 8.0 / photon_sigma;
  const double dx = 2.0 * xr / (nx - 1), dt = 2.0 * tr / (nt - 1);
  const double beta = shift_hz / nu_rf, w = units::kTwoPi * nu_rf;
  std::vector<double> px(nx);
  double pn = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = -xr + i * dx;
    px[i] = std::exp(-0.5 * x * x / (sigma_x * sigma_x));
    pn += px[i];
  }
  std::vector<std::vector<std::complex<double>>> psi(nx, std::vector<std::complex<double>>(nt));
  double en = 0.0;
  for (int k = 0; k < nt; ++k) {
    const double t = -tr + k * dt;
    en += std::exp(-t * t * photon_sigma * photon_sigma);
  }
  for (int i = 0; i < nx; ++i) {
    const double x = -xr + i * dx;
    for (int k = 0; k < nt; ++k) {
      const double t = -tr + k * dt;
      const double env = std::exp(-0.5 * t * t * photon_sigma * photon_sigma) / std::sqrt(en);
      psi[i][k] = std::polar(env, beta * std::sin(w * (t + x)));
    }
  }
  double p = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) {
      std::complex<double> ov = 0.0;
      for (int k = 0; k < nt; ++k) ov += std::conj(psi[i][k]) * psi[j][k];
      p += px[i] * px[j] * std::norm(ov);
    }
  }
  return p / (pn * pn);
}

}  // namespace

TEST_CASE("frequency shift examples") {
  const auto m = default_shifter();
  CHECK(shift_magnitude(0.0, m) == 0.0);
  CHECK(shift_magnitude(4.0, m) == doctest::Approx(25.1327e9).epsilon(1e-5));
  CHECK(m.max_shift() == doctest::Approx(85e9).epsilon(1e-12));
  CHECK(shift_magnitude(m.v0_max, m) == doctest::Approx(85e9).epsilon(1e-12));
  CHECK(shift_magnitude(-m.v0_max, m) == doctest::Approx(-85e9).epsilon(1e-12));
}

TEST_CASE("shift is exactly linear in drive amplitude") {
  const auto m = default_shifter();
  const double a = 1.3, b = 2.9;
  CHECK(shift_magnitude(a + b, m) == doctest::Approx(shift_magnitude(a, m) + shift_magnitude(b, m)).epsilon(1e-14));
  CHECK(shift_magnitude(-a, m) == -shift_magnitude(a, m));
  CHECK(drive_voltage(shift_magnitude(2.2, m), m) == doctest::Approx(2.2).epsilon(1e-14));
}

TEST_CASE("overdrive is rejected") {
  const auto m = default_shifter();
  CHECK_THROWS_AS(shift_magnitude(1.01 * m.v0_max, m), OverdriveError);
  CHECK_THROWS_AS(drive_voltage(86e9, m), OverdriveError);
  CHECK_THROWS_AS(ShifterModel(0.0, 8e9, 1.0), DomainError);
}

TEST_CASE("required shift vanishes at degeneracy and follows the herald detuning") {
  CHECK(required_shift(kHeraldRef, kPump, kSignal) == doctest::Approx(0.0).epsilon(1e-12));
  const double d = units::ghz_to_rad_per_s(40.0);
  // A herald above its center means a signal below its center: shift up.
  CHECK(required_shift(kHeraldRef + d, kPump, kSignal) == doctest::Approx(40e9).epsilon(1e-6));
  CHECK(required_shift(kHeraldRef - d, kPump, kSignal) == doctest::Approx(-40e9).epsilon(1e-6));
}

TEST_CASE("LUT covers the calibrated range and flags bins beyond the shifter range") {
  const auto tof = default_spectrometer();
  const auto m = default_shifter();
  const auto lut = build_lut(tof, kPump, kSignal, m);
  const auto* zero = lut.find(0);
  REQUIRE(zero != nullptr);
  CHECK(std::abs(zero->shift) < 1.0);
  CHECK(std::abs(zero->v0) < 1e-9);
  CHECK(lut.find(lut.last_bin() + 1) == nullptr);
  std::size_t inside = 0, inside_ok = 0;
  for (const auto& e : lut.entries()) {
    CHECK(std::abs(e.v0) <= m.v0_max * (1.0 + 1e-12));
    CHECK(e.drive_phase == 0.0);
    const double detune_hz = units::rad_per_s_to_hz(std::abs(e.herald_frequency - kHeraldRef));
    if (detune_hz <= m.max_shift()) {
      ++inside;
      inside_ok += e.in_range ? 1 : 0;
      CHECK(shift_magnitude(e.v0, m) == doctest::Approx(e.shift).epsilon(1e-9));
    } else {
      CHECK_FALSE(e.in_range);
    }
  }
  CHECK(static_cast<double>(inside_ok) >= 0.99 * static_cast<double>(inside));
  CHECK(lut.in_range_count() == inside_ok);
  std::ostringstream csv;
  lut.write(csv);
  CHECK(csv.str().rfind("bin,herald_frequency_ghz,v0_volts,in_range\n", 0) == 0);
}

TEST_CASE("LUT shift brings the partner within half a bin of the target") {
  const auto tof = default_spectrometer();
  const auto m = default_shifter();
  const auto lut = build_lut(tof, kPump, kSignal, m);
  CounterRng rng(11);
  std::uniform_real_distribution<double> u(-80.0, 80.0);
  for (int i = 0; i < 2000; ++i) {
    const double wh = kHeraldRef + units::ghz_to_rad_per_s(u(rng));
    const auto* e = lut.find(tof.frequency_to_bin(wh));
    REQUIRE(e != nullptr);
    REQUIRE(e->in_range);
    const double out = (kPump - wh) + units::hz_to_rad_per_s(shift_magnitude(e->v0, m));
    CHECK(std::abs(out - kSignal) <= 0.5 * tof.bin_frequency_width() * (1.0 + 1e-9));
  }
}

TEST_CASE("temporal phase preserves the norm") {
  const auto m = default_shifter();
  const auto pulse = gaussian_pulse(kPhotonSigma);
  for (auto mode : {PhaseMode::kSinusoidal, PhaseMode::kLinearized}) {
    for (double v0 : {-m.v0_max, 0.7, m.v0_max}) {
      const auto out = apply_temporal_phase(pulse, v0, 0.3, m, mode);
      CHECK(out.norm_sq() == doctest::Approx(pulse.norm_sq()).epsilon(1e-9));
    }
  }
}

TEST_CASE("linearized phase is a rigid spectral translation") {
  const auto m = default_shifter();
  const auto pulse = gaussian_pulse(kPhotonSigma);
  const double v0 = 0.6 * m.v0_max;
  const double dw = units::hz_to_rad_per_s(shift_magnitude(v0, m));
  const auto out = apply_temporal_phase(pulse, v0, 0.0, m, PhaseMode::kLinearized);
  std::vector<double> w, w_shift;
  for (int i = -60; i <= 60; ++i) {
    w.push_back(i * 0.1 * kPhotonSigma);
    w_shift.push_back(i * 0.1 * kPhotonSigma + dw);
  }
  const auto s0 = spectrum(pulse, w);
  const auto s1 = spectrum(out, w_shift);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(std::abs(s1[i]) - std::abs(s0[i])) < 1e-9 * std::abs(s0[w.size() / 2]));
  }
  // Transform-limited Gaussian: |S(w)| peaks at the shift.
  std::vector<double> probe{dw - 0.5 * kPhotonSigma, dw, dw + 0.5 * kPhotonSigma};
  const auto sp = spectrum(out, probe);
  CHECK(std::abs(sp[1]) > std::abs(sp[0]));
  CHECK(std::abs(sp[1]) > std::abs(sp[2]));
}

TEST_CASE("sinusoidal and linearized spectra agree for the photon bandwidth") {
  const auto m = default_shifter();
  const auto pulse = gaussian_pulse(kPhotonSigma);
  std::vector<double> w;
  for (int i = -400; i <= 400; ++i) w.push_back(i * 0.05 * kPhotonSigma);
  for (double v0 : {0.25 * m.v0_max, m.v0_max}) {
    const double dw = units::hz_to_rad_per_s(shift_magnitude(v0, m));
    std::vector<double> ws;
    for (double x : w) ws.push_back(x + dw);
    const auto a = spectrum(apply_temporal_phase(pulse, v0, 0.0, m, PhaseMode::kSinusoidal), ws);
    const auto b = spectrum(apply_temporal_phase(pulse, v0, 0.0, m, PhaseMode::kLinearized), ws);
    CHECK(intensity_overlap(a, b) >= 0.94);
  }
}

TEST_CASE("for very short pulses the two phase modes coincide") {
  const auto m = default_shifter();
  const double sigma = units::ghz_to_rad_per_s(2000.0);
  const auto pulse = gaussian_pulse(sigma);
  std::vector<double> w;
  const double dw = units::hz_to_rad_per_s(m.max_shift());
  for (int i = -100; i <= 100; ++i) w.push_back(dw + i * 0.05 * sigma);
  const auto a = spectrum(apply_temporal_phase(pulse, m.v0_max, 0.0, m, PhaseMode::kSinusoidal), w);
  const auto b = spectrum(apply_temporal_phase(pulse, m.v0_max, 0.0, m, PhaseMode::kLinearized), w);
  CHECK(intensity_overlap(a, b) > 1.0 - 1e-6);
}

TEST_CASE("drive timing jitter purity") {
  const auto m = default_shifter();
  CHECK(phase_jitter_purity(0.0, kPhotonSigma, m.max_shift(), m) == 1.0);
  CHECK(phase_jitter_purity(units::ps_to_s(5.3), kPhotonSigma, 0.0, m) == 1.0);
  const double p53 = phase_jitter_purity(units::ps_to_s(5.3), kPhotonSigma, m.max_shift(), m);
  CHECK(p53 > 0.95);
  CHECK(p53 < 1.0);
  double prev = 1.0;
  for (double ps : {1.0, 3.0, 5.3, 8.0, 12.0}) {
    const double p = phase_jitter_purity(units::ps_to_s(ps), kPhotonSigma, m.max_shift(), m);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("jitter purity matches a brute-force double integral") {
  const auto m = default_shifter();
  for (double ps : {5.3, 12.0}) {
    const double p = phase_jitter_purity(units::ps_to_s(ps), kPhotonSigma, m.max_shift(), m);
    const double oracle = jitter_purity_oracle(units::ps_to_s(ps), kPhotonSigma, m.max_shift(), m.nu_rf);
    CHECK(p == doctest::Approx(oracle).epsilon(1e-4));
  }
}
