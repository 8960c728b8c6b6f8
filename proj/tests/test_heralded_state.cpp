#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "freqmux/errors.hpp"
#include "freqmux/heralded_state.hpp"
#include "freqmux/spectral.hpp"
#include "freqmux/spectrometer.hpp"
#include "freqmux/units.hpp"

using namespace freqmux;
using namespace freqmux::heralded;

namespace {

const double kPump = units::wavelength_to_angular(775e-9);
const double kSignal = units::wavelength_to_angular(1535e-9);
const double kSigma = units::ghz_to_rad_per_s(50.95) / std::numbers::sqrt2;
const double kFilter = units::ghz_to_rad_per_s(50.0);

HeraldedStateModel base_model(double filter_width = kFilter) {
  HeraldedStateModel m(spectral::PumpEnvelope(kSigma, kPump), kSignal, filter_width);
  m.quadrature.signal_points = 65;
  m.quadrature.herald_points = 65;
  m.quadrature.posterior_points = 33;
  m.quadrature.workers = 1;
  return m;
}

spectrometer::SpectrometerModel spectrometer_with(double jitter_ghz, double tdc_ps = 33.0) {
  return spectrometer::SpectrometerModel::from_lab_units(
      16.0, tdc_ps, spectrometer::JitterDistribution::gaussian(units::ps_to_s(16.0 * jitter_ghz)),
      kPump - kSignal, units::ghz_to_rad_per_s(500.0));
}

HeraldedStateModel operating_model(double jitter_ghz, double gamma) {
  auto m = base_model();
  m.herald_span = 1.11e12;
  m.shift_range = units::ghz_to_rad_per_s(170.0);
  m.gvd = gamma;
  if (jitter_ghz > 0.0) m.spectrometer = spectrometer_with(jitter_ghz);
  return m;
}

}  // namespace

TEST_CASE("without dispersion and with a wide filter the wavepacket is the real pump slice") {
  const auto m = base_model(40.0 * kSigma);
  const double wh = m.herald_center() + 0.3 * kSigma;
  const double wi = wh + 0.5 * kSigma;
  const auto wp = conditional_wavepacket(wh, wi, m);
  CHECK(wp.filter_transmission == doctest::Approx(1.0).epsilon(1e-9));
  const auto tw = wp.grid.trapezoid_weights();
  double norm = 0.0;
  for (std::size_t j = 0; j < wp.grid.points(); ++j) {
    const auto z = wp.amplitude[static_cast<Eigen::Index>(j)];
    CHECK(std::abs(z.imag()) < 1e-15);
    norm += tw[j] * std::norm(z);
    // Energy conservation: the signal amplitude peaks at w_p - w_i, which
    // the shift moves by w_c - (w_p - w_H).
    const double u = wp.grid[j] - m.filter_center;
    const double oracle = std::exp(-0.5 * std::pow((u + wi - wh) / kSigma, 2));
    const double scale = wp.amplitude[static_cast<Eigen::Index>(wp.grid.points() / 2)].real() /
                         std::exp(-0.5 * std::pow((wi - wh) / kSigma, 2));
    CHECK(z.real() == doctest::Approx(scale * oracle).epsilon(1e-9));
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dispersion phase is quadratic in the pre-shift signal frequency") {
  auto m = base_model();
  m.gvd = -3.4e-24;
  m.gvd_reference = m.filter_center - 0.2 * kSigma;
  const double wh = m.herald_center() + 0.4 * kSigma;
  const auto wp = conditional_wavepacket(wh, wh, m);
  const double pre = m.filter_center - *m.gvd_reference;
  const double h = wh - m.herald_center();
  const auto phase = [&](std::size_t j) {
    const double v = pre + (wp.grid[j] - m.filter_center) - h;
    return m.gvd * v * v;
  };
  const std::size_t c = wp.grid.points() / 2;
  for (std::size_t j : {0ul, 10ul, 40ul, 64ul}) {
    const auto ratio = wp.amplitude[static_cast<Eigen::Index>(j)] / wp.amplitude[static_cast<Eigen::Index>(c)];
    CHECK(std::arg(ratio * std::polar(1.0, -(phase(j) - phase(c)))) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("a herald far outside the filter gives a vacuous event") {
  const auto m = base_model();
  CHECK_THROWS_AS(conditional_wavepacket(m.herald_center(), m.herald_center() + 40.0 * kSigma, m),
                  VacuousEventError);
}

TEST_CASE("perfect detection of a single outcome is pure") {
  auto m = base_model();
  m.gvd = -3.4e-24;
  CHECK(purity_integral(m) == doctest::Approx(1.0).epsilon(1e-12));
  const auto rho = assemble_density_matrix(m);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density matrix is Hermitian, unit trace and positive semidefinite") {
  const auto m = operating_model(10.0, -3.4e-24);
  const auto rho = assemble_density_matrix(m);
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.hermiticity_error() < 1e-14);
  const auto ev = rho.eigenvalues();
  CHECK(ev.minCoeff() > -1e-12);
  CHECK(rho.eigen_purity() == doctest::Approx(purity_integral(m)).epsilon(1e-4));
  CHECK(rho.purity() == doctest::Approx(purity_integral(m)).epsilon(1e-10));
  std::ostringstream out;
  rho.write(out);
  CHECK(out.str().rfind("# freqmux-density 1", 0) == 0);
}

namespace {

// Filtered JSA for one herald outcome: output top-hat on the signal, and the
// outcome likelihood of std-dev sf as a Gaussian window on the herald.
spectral::JointSpectralAmplitude filtered_jsa(const HeraldedStateModel& m, double sf) {
  const double wh = m.herald_center();
  spectral::FrequencyGrid sg(kSignal, 1.6 * kFilter, 321);
  spectral::FrequencyGrid hg(wh, 24.0 * sf, 241);
  spectral::AnticorrelatedOptions allow;
  allow.truncation = spectral::Truncation::kAllow;
  auto jsa = spectral::build_anticorrelated_jsa(spectral::PumpEnvelope(kSigma, kPump), sg, hg, allow);
  jsa = spectral::apply_filter(jsa, {spectral::TopHat{kSignal, kFilter}, spectral::Axis::kSignal}).jsa;
  return spectral::apply_filter(jsa, {spectral::GaussianPass{wh, sf}, spectral::Axis::kHerald}).jsa;
}

// Same, with every herald column rescaled so that each conditional signal
// wavepacket carries only its outcome likelihood, not its filter loss.
spectral::JointSpectralAmplitude column_normalised(const spectral::JointSpectralAmplitude& jsa,
                                                   double sf) {
  const auto& sg = jsa.signal_grid();
  const auto& hg = jsa.herald_grid();
  const auto tw = sg.trapezoid_weights();
  Eigen::MatrixXcd m = jsa.amplitude();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double n = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) n += tw[static_cast<std::size_t>(i)] * std::norm(m(i, j));
    const double x = (hg[static_cast<std::size_t>(j)] - hg.center()) / sf;
    m.col(j) *= std::exp(-0.25 * x * x) / std::sqrt(n);
  }
  return {sg, hg, m};
}

HeraldedStateModel single_outcome_model(double jitter_ghz) {
  auto m = base_model();
  m.spectrometer = spectrometer_with(jitter_ghz, 0.05);
  m.quadrature.signal_points = 129;
  m.quadrature.posterior_points = 129;
  return m;
}

}  // namespace

TEST_CASE("single-outcome purity matches a Schmidt decomposition of the filtered JSA") {
  // With a TDC bin far below the jitter, one herald outcome applies a
  // Gaussian intensity window of std-dev sigma_f to the herald arm.
  const auto m = single_outcome_model(10.0);
  const double sf = units::ghz_to_rad_per_s(10.0);
  CHECK(purity_integral(m) == doctest::Approx(spectral::schmidt_purity(filtered_jsa(m, sf))).epsilon(1e-2));
}

TEST_CASE("single-outcome purity equals the Schmidt purity of the column-normalised JSA") {
  // Each conditional wavepacket is normalised after the filter, so the exact
  // counterpart rescales every herald column of the filtered JSA.
  for (double jitter_ghz : {5.0, 10.0, 20.0, 30.0}) {
    const auto m = single_outcome_model(jitter_ghz);
    const double sf = units::ghz_to_rad_per_s(jitter_ghz);
    const double oracle = spectral::schmidt_purity(column_normalised(filtered_jsa(m, sf), sf));
    CHECK(purity_integral(m) == doctest::Approx(oracle).epsilon(1e-3));
  }
}

TEST_CASE("purity falls monotonically with herald jitter") {
  double prev = 1.0 + 1e-12;
  for (double j : {0.0, 5.0, 10.0, 20.0, 30.0}) {
    const double p = purity_integral(operating_model(j, 0.0));
    CHECK(p < prev);
    CHECK(p > 0.0);
    prev = p;
  }
}

TEST_CASE("purity falls monotonically with dispersion") {
  double prev = 1.0 + 1e-12;
  for (double g : {0.0, -1e-24, -2e-24, -3.4e-24, -6e-24}) {
    const double p = purity_integral(operating_model(0.0, g));
    CHECK(p < prev);
    prev = p;
  }
  // Ideal detection without dispersion leaves only the shift-free mixture,
  // whose members coincide: pure.
  CHECK(purity_integral(operating_model(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quadrature refinement moves the purity by less than 1e-3") {
  auto m = operating_model(10.0, -3.4e-24);
  PurityOptions opts;
  opts.check_refinement = true;
  CHECK_NOTHROW(purity_integral(m, opts));
  auto fine = m;
  fine.quadrature = m.quadrature.refined();
  CHECK(std::abs(purity_integral(fine) - purity_integral(m)) < 1e-3);
}

TEST_CASE("herald mixture respects the acceptance window") {
  auto m = operating_model(10.0, 0.0);
  CHECK(m.acceptance_span() == doctest::Approx(units::ghz_to_rad_per_s(170.0)));
  const auto mix = herald_mixture(m);
  double total = 0.0;
  for (std::size_t k = 0; k < mix.weight.size(); ++k) {
    total += mix.weight[k];
    CHECK(std::abs(mix.outcome[k] - m.herald_center()) <= 0.5 * m.acceptance_span() * (1.0 + 1e-9));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // 170 GHz / 2.0625 GHz per bin.
  CHECK(mix.outcome_count == 83);
  m.herald_span = 0.0;
  CHECK(herald_mixture(m).outcome_count == 1);
}

TEST_CASE("gvd parameter from fibre data") {
  const double c = units::kSpeedOfLight;
  const double lambda = 1535e-9;
  const double d_si = 18.0 * 1e-12 / (1e-9 * 1e3);
  const double oracle = 0.5 * (-d_si * lambda * lambda / (2.0 * std::numbers::pi * c)) * 300.0;
  CHECK(gvd_parameter(18.0, 300.0, lambda) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(gvd_parameter(18.0, 300.0, lambda) == doctest::Approx(-3.377e-24).epsilon(1e-3));
  CHECK(gvd_parameter(0.0, 300.0, lambda) == 0.0);
  CHECK(gvd_parameter(18.0, 600.0, lambda) == doctest::Approx(2.0 * gvd_parameter(18.0, 300.0, lambda)));
}

TEST_CASE("purity does not depend on the worker count") {
  auto a = operating_model(10.0, -3.4e-24);
  auto b = a;
  b.quadrature.workers = 3;
  CHECK(purity_integral(a) == purity_integral(b));
}

TEST_CASE("invalid models are rejected") {
  auto m = base_model();
  m.filter_width = 0.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = base_model();
  m.herald_span = -1.0;
  CHECK_THROWS_AS(herald_mixture(m), DomainError);
}

TEST_CASE("scalar and AVX2 kernels give the same purity") {
  if (!simd::backend_supported(simd::Backend::kAvx2)) return;
  const auto m = operating_model(10.0, -3.4e-24);
  double a = 0.0, b = 0.0;
  {
    simd::ScopedBackend s(simd::Backend::kScalar);
    a = purity_integral(m);
  }
  {
    simd::ScopedBackend s(simd::Backend::kAvx2);
    b = purity_integral(m);
  }
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}
