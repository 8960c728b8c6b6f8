#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "freqmux/kernels.hpp"
#include "freqmux/spectral.hpp"
#include "freqmux/spectrometer.hpp"

namespace freqmux::heralded {

struct QuadratureOptions {
  std::size_t signal_points = 129;     // nodes across the output filter
  std::size_t herald_points = 129;     // outcome nodes with ideal detection
  std::size_t posterior_points = 65;   // w_i nodes per herald outcome
  double posterior_sigmas = 6.0;       // half-width of the w_i grid
  unsigned workers = 0;                // 0 = hardware concurrency

  QuadratureOptions refined() const;
};

// Everything that shapes the heralded signal wavepacket.
//
// The herald outcome w_H selects a shift w_c - (w_p - w_H) that carries the
// nominal signal partner onto the filter center. Dispersion acts before the
// shift, so the quadratic phase is taken in the pre-shift signal frequency.
struct HeraldedStateModel {
  HeraldedStateModel(spectral::PumpEnvelope pump_envelope, double filter_center_frequency,
                     double filter_full_width)
      : pump(pump_envelope), filter_center(filter_center_frequency), filter_width(filter_full_width) {}

  spectral::PumpEnvelope pump;
  double filter_center;  // w_c
  double filter_width;   // full width of the top-hat output filter, rad/s
  double gvd = 0.0;      // gamma, s^2
  // Expansion point of the dispersion phase (pre-shift frequency); defaults to w_c.
  std::optional<double> gvd_reference;
  // Herald detection; nullopt = perfect frequency resolution.
  std::optional<spectrometer::SpectrometerModel> spectrometer;
  // Full width of accepted herald outcomes around the degenerate herald
  // frequency w_p - w_c. Zero keeps only the central outcome.
  double herald_span = 0.0;
  // Total shift range of the modulator; outcomes beyond it are discarded.
  std::optional<double> shift_range;
  // Herald marginal std-dev (rad/s); nullopt = flat over the accepted range.
  std::optional<double> herald_marginal_sigma;
  QuadratureOptions quadrature;

  double herald_center() const { return pump.center - filter_center; }
  double acceptance_span() const;
  void validate() const;
};

// Nodes exactly spanning the output filter.
spectral::FrequencyGrid signal_grid(const HeraldedStateModel& model);

struct ConditionalWavepacket {
  double herald_outcome;  // w_H
  double herald_true;     // w_i
  spectral::FrequencyGrid grid;
  Eigen::VectorXcd amplitude;  // unit norm under trapezoid quadrature
  double filter_transmission;  // fraction of the Gaussian kept by the filter
};

// Throws VacuousEventError when the filter keeps less than 1e-12 of the
// conditional Gaussian.
ConditionalWavepacket conditional_wavepacket(double herald_outcome, double herald_true,
                                             const HeraldedStateModel& model);

// Discrete mixture over (w_H, w_i) nodes: weights sum to 1.
struct HeraldMixture {
  std::vector<double> outcome;   // w_H per term
  std::vector<double> herald;    // w_i per term
  std::vector<double> weight;    // P(w_H) P(w_i | w_H) dw
  std::size_t outcome_count = 0;
};

HeraldMixture herald_mixture(const HeraldedStateModel& model);

// Rows sqrt(trapezoid) * A on the signal grid for every mixture term; zero
// weight is given to vacuous terms.
struct WavepacketStack {
  spectral::FrequencyGrid grid;
  simd::ComplexRows rows;
  std::vector<double> weights;
};
WavepacketStack wavepacket_stack(const HeraldedStateModel& model);

// rho_ij scaled by sqrt(w_i w_j) so that plain matrix algebra gives
// quadrature-weighted traces.
struct DiscretizedDensityMatrix {
  spectral::FrequencyGrid grid;
  Eigen::MatrixXcd matrix;

  double trace() const;
  double hermiticity_error() const;
  double purity() const;  // sum |rho_ij|^2
  Eigen::VectorXd eigenvalues() const;
  double eigen_purity() const;
  // Rows "i j re im" with the quadrature weights divided out.
  void write(std::ostream& out) const;
};

DiscretizedDensityMatrix assemble_density_matrix(const HeraldedStateModel& model);

struct PurityOptions {
  bool check_refinement = false;
  double refinement_tolerance = 1e-3;
};

// Tr(rho^2) as the weighted double sum of squared overlaps, without
// materialising rho. With refinement checking, the quadrature is refined
// once and ConvergenceError is thrown if the result moves by more than the
// tolerance.
double purity_integral(const HeraldedStateModel& model, const PurityOptions& options = {});

// gamma = beta2 L / 2 with beta2 = -D lambda^2 / (2 pi c). D in ps/(nm km),
// L in m, lambda in m.
double gvd_parameter(double dispersion_ps_nm_km, double length_m, double wavelength_m);

}  // namespace freqmux::heralded
