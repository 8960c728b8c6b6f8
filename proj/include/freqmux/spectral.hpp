#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace freqmux::spectral {

// Uniform grid of angular frequencies, symmetric about `center`.
class FrequencyGrid {
 public:
  FrequencyGrid(double center, double span, std::size_t points);
  static FrequencyGrid from_bounds(double lo, double hi, std::size_t points);

  double center() const { return center_; }
  double span() const { return span_; }
  std::size_t points() const { return points_; }
  double spacing() const { return span_ / static_cast<double>(points_ - 1); }
  double lo() const { return center_ - 0.5 * span_; }
  double hi() const { return center_ + 0.5 * span_; }

  double operator[](std::size_t i) const {
    return center_ + (static_cast<double>(i) - 0.5 * static_cast<double>(points_ - 1)) * spacing();
  }
  std::vector<double> values() const;
  std::vector<double> trapezoid_weights() const;

  // Same span, spacing halved (2n - 1 points; old nodes are a subset).
  FrequencyGrid refined() const { return {center_, span_, 2 * points_ - 1}; }

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  double center_;
  double span_;
  std::size_t points_;
};

// Gaussian pump spectral amplitude exp(-(w - center)^2 / (2 sigma^2)).
// `sigma` is the amplitude standard deviation in rad/s.
struct PumpEnvelope {
  double sigma;
  double center;

  PumpEnvelope(double sigma_amplitude, double center_frequency);
  // Pump characterised by the FWHM of its intensity spectrum (rad/s).
  static PumpEnvelope from_intensity_fwhm(double fwhm, double center_frequency);

  double amplitude(double sum_frequency) const;
  double intensity_sigma() const;
};

// Optional Gaussian phase-matching factor
// exp(-(a (ws - cs) + b (wi - ci))^2 / (2 sigma^2)). Disabled by default: the
// phase-matching bandwidth is taken to be much wider than the pump.
struct PhaseMatching {
  double sigma;
  double signal_slope = 1.0;
  double herald_slope = -1.0;
  double signal_center = 0.0;
  double herald_center = 0.0;

  double amplitude(double ws, double wi) const;
};

class JointSpectralAmplitude {
 public:
  // Rows index the signal grid, columns the herald grid. The amplitude is
  // rescaled to unit L2 norm under trapezoid quadrature.
  JointSpectralAmplitude(FrequencyGrid signal, FrequencyGrid herald,
                         Eigen::MatrixXcd amplitude);

  const FrequencyGrid& signal_grid() const { return signal_; }
  const FrequencyGrid& herald_grid() const { return herald_; }
  const Eigen::MatrixXcd& amplitude() const { return amplitude_; }

  // Trapezoid-weighted sum of |f|^2 (1 after construction).
  double norm_sq() const;
  // Amplitude with sqrt quadrature weights folded in; its Frobenius norm is 1.
  Eigen::MatrixXcd weighted_matrix() const;
  JointSpectralAmplitude transposed() const;

  // Joint intensity |f|^2 times quadrature weights, summing to 1.
  Eigen::MatrixXd joint_probability() const;

 private:
  FrequencyGrid signal_;
  FrequencyGrid herald_;
  Eigen::MatrixXcd amplitude_;
};

enum class Truncation { kCheck, kAllow };

struct AnticorrelatedOptions {
  Truncation truncation = Truncation::kCheck;
  std::optional<PhaseMatching> phase_matching;
};

// f(ws, wi) = pump(ws + wi) [* phase matching].
JointSpectralAmplitude build_anticorrelated_jsa(const PumpEnvelope& pump,
                                                const FrequencyGrid& signal_grid,
                                                const FrequencyGrid& herald_grid,
                                                const AnticorrelatedOptions& options = {});

struct FactorableSpec {
  double signal_sigma;  // amplitude std-dev, rad/s
  double herald_sigma;
  double signal_center;
  double herald_center;
};

JointSpectralAmplitude build_factorable_jsa(const FactorableSpec& spec,
                                            const FrequencyGrid& signal_grid,
                                            const FrequencyGrid& herald_grid,
                                            Truncation truncation = Truncation::kCheck);

// Factorable Gaussian with amplitude widths `sigma_sum` along (ws + wi)/sqrt2
// and `sigma_diff` along (ws - wi)/sqrt2, i.e. rotated by 45 degrees.
JointSpectralAmplitude build_rotated_gaussian_jsa(double sigma_sum, double sigma_diff,
                                                  double signal_center, double herald_center,
                                                  const FrequencyGrid& signal_grid,
                                                  const FrequencyGrid& herald_grid,
                                                  Truncation truncation = Truncation::kCheck);

// Schmidt eigenvalues (descending, summing to 1).
std::vector<double> schmidt_coefficients(const JointSpectralAmplitude& jsa);
// sum_k lambda_k^2.
double schmidt_purity(const JointSpectralAmplitude& jsa);

enum class Axis { kSignal, kHerald };

struct AllPass {};
// Full width `width`, unit transmission inside, 1/sqrt(2) amplitude exactly
// on an edge (half intensity weight), zero outside.
struct TopHat {
  double center;
  double width;
};
// Intensity transmission exp(-(w - c)^2 / (2 sigma^2)).
struct GaussianPass {
  double center;
  double sigma;
};

struct SpectralWindow {
  std::variant<AllPass, TopHat, GaussianPass> shape = AllPass{};
  Axis axis = Axis::kSignal;

  // Amplitude transmission at angular frequency w.
  double transmission(double w) const;
};

struct FilterResult {
  JointSpectralAmplitude jsa;
  double transmitted;  // pre-renormalisation probability kept by the window
};

FilterResult apply_filter(const JointSpectralAmplitude& jsa, const SpectralWindow& window);

// Columnar text: '#'-prefixed header with grid metadata, then one
// "omega_s omega_i re im" row per sample, signal index slowest.
void write_jsa(std::ostream& out, const JointSpectralAmplitude& jsa);
JointSpectralAmplitude read_jsa(std::istream& in);

}  // namespace freqmux::spectral
