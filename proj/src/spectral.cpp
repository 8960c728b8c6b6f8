#include "freqmux/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/units.hpp"

namespace freqmux::spectral {
namespace {

constexpr double kTruncationLevel = 1e-6;
constexpr double kNormTolerance = 1e-9;

// Offset from a Gaussian's center at which its amplitude falls to the
// truncation level.
double truncation_radius(double sigma) {
  return sigma * std::sqrt(-2.0 * std::log(kTruncationLevel));
}

void check_edges(double sigma, double center, const FrequencyGrid& g, const char* what) {
  const double r = truncation_radius(sigma);
  if (g.lo() > center - r || g.hi() < center + r) {
    throw GridTooNarrowError(std::string(what) +
                             ": grid truncates the Gaussian envelope above 1e-6 of its peak");
  }
}

template <class F>
Eigen::MatrixXcd tabulate(const FrequencyGrid& s, const FrequencyGrid& h, F&& f) {
  Eigen::MatrixXcd m(s.points(), h.points());
  for (std::size_t i = 0; i < s.points(); ++i) {
    const double ws = s[i];
    for (std::size_t j = 0; j < h.points(); ++j) m(i, j) = f(ws, h[j]);
  }
  return m;
}

}  // namespace

FrequencyGrid::FrequencyGrid(double center, double span, std::size_t points)
    : center_(center), span_(span), points_(points) {
  if (points < 2) throw DomainError("FrequencyGrid: need at least 2 points");
  if (!(span > 0.0) || !std::isfinite(span)) throw DomainError("FrequencyGrid: span must be positive");
  if (!std::isfinite(center)) throw DomainError("FrequencyGrid: center must be finite");
  if (!(spacing() > 0.0)) throw DomainError("FrequencyGrid: spacing underflows");
}

FrequencyGrid FrequencyGrid::from_bounds(double lo, double hi, std::size_t points) {
  return {0.5 * (lo + hi), hi - lo, points};
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(points_);
  for (std::size_t i = 0; i < points_; ++i) v[i] = (*this)[i];
  return v;
}

std::vector<double> FrequencyGrid::trapezoid_weights() const {
  return numerics::trapezoid_weights(points_, spacing());
}

PumpEnvelope::PumpEnvelope(double sigma_amplitude, double center_frequency)
    : sigma(sigma_amplitude), center(center_frequency) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("PumpEnvelope: sigma must be positive");
}

PumpEnvelope PumpEnvelope::from_intensity_fwhm(double fwhm, double center_frequency) {
  // Intensity std-dev fwhm/2.355; the amplitude is sqrt2 wider.
  return {fwhm / units::kFwhmPerSigma * std::numbers::sqrt2, center_frequency};
}

double PumpEnvelope::amplitude(double sum_frequency) const {
  const double x = (sum_frequency - center) / sigma;
  return std::exp(-0.5 * x * x);
}

double PumpEnvelope::intensity_sigma() const { return sigma / std::numbers::sqrt2; }

double PhaseMatching::amplitude(double ws, double wi) const {
  const double x = (signal_slope * (ws - signal_center) + herald_slope * (wi - herald_center)) / sigma;
  return std::exp(-0.5 * x * x);
}

JointSpectralAmplitude::JointSpectralAmplitude(FrequencyGrid signal, FrequencyGrid herald,
                                               Eigen::MatrixXcd amplitude)
    : signal_(signal), herald_(herald), amplitude_(std::move(amplitude)) {
  if (static_cast<std::size_t>(amplitude_.rows()) != signal_.points() ||
      static_cast<std::size_t>(amplitude_.cols()) != herald_.points()) {
    throw DomainError("JointSpectralAmplitude: matrix shape does not match grids");
  }
  if (!amplitude_.allFinite()) throw DomainError("JointSpectralAmplitude: non-finite amplitude");
  const double n2 = norm_sq();
  if (!(n2 > 0.0)) throw ZeroOverlapError("JointSpectralAmplitude: zero amplitude");
  amplitude_ /= std::sqrt(n2);
  if (std::abs(norm_sq() - 1.0) > kNormTolerance) {
    throw NumericError("JointSpectralAmplitude: normalisation failed");
  }
}

double JointSpectralAmplitude::norm_sq() const {
  const auto ws = signal_.trapezoid_weights();
  const auto wh = herald_.trapezoid_weights();
  double total = 0.0;
  for (Eigen::Index i = 0; i < amplitude_.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < amplitude_.cols(); ++j) row += wh[j] * std::norm(amplitude_(i, j));
    total += ws[i] * row;
  }
  return total;
}

Eigen::MatrixXcd JointSpectralAmplitude::weighted_matrix() const {
  const auto ws = signal_.trapezoid_weights();
  const auto wh = herald_.trapezoid_weights();
  Eigen::MatrixXcd m = amplitude_;
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= std::sqrt(ws[i]);
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= std::sqrt(wh[j]);
  return m;
}

JointSpectralAmplitude JointSpectralAmplitude::transposed() const {
  return {herald_, signal_, amplitude_.transpose()};
}

Eigen::MatrixXd JointSpectralAmplitude::joint_probability() const {
  return weighted_matrix().cwiseAbs2();
}

JointSpectralAmplitude build_anticorrelated_jsa(const PumpEnvelope& pump,
                                                const FrequencyGrid& signal_grid,
                                                const FrequencyGrid& herald_grid,
                                                const AnticorrelatedOptions& options) {
  if (options.truncation == Truncation::kCheck) {
    // The ridge runs along ws + wi = const; it must be resolved across its
    // width, i.e. the extreme sum frequencies of the grid must lie in the tails.
    const double r = truncation_radius(pump.sigma);
    if (signal_grid.lo() + herald_grid.lo() > pump.center - r ||
        signal_grid.hi() + herald_grid.hi() < pump.center + r) {
      throw GridTooNarrowError(
          "build_anticorrelated_jsa: grid corners do not reach the 1e-6 tails of the pump envelope");
    }
  }
  auto m = tabulate(signal_grid, herald_grid, [&](double ws, double wi) {
    double a = pump.amplitude(ws + wi);
    if (options.phase_matching) a *= options.phase_matching->amplitude(ws, wi);
    return std::complex<double>(a, 0.0);
  });
  return {signal_grid, herald_grid, std::move(m)};
}

JointSpectralAmplitude build_factorable_jsa(const FactorableSpec& spec,
                                            const FrequencyGrid& signal_grid,
                                            const FrequencyGrid& herald_grid,
                                            Truncation truncation) {
  if (!(spec.signal_sigma > 0.0) || !(spec.herald_sigma > 0.0)) {
    throw DomainError("build_factorable_jsa: sigmas must be positive");
  }
  if (truncation == Truncation::kCheck) {
    check_edges(spec.signal_sigma, spec.signal_center, signal_grid, "build_factorable_jsa (signal)");
    check_edges(spec.herald_sigma, spec.herald_center, herald_grid, "build_factorable_jsa (herald)");
  }
  auto m = tabulate(signal_grid, herald_grid, [&](double ws, double wi) {
    const double xs = (ws - spec.signal_center) / spec.signal_sigma;
    const double xh = (wi - spec.herald_center) / spec.herald_sigma;
    return std::complex<double>(std::exp(-0.5 * (xs * xs + xh * xh)), 0.0);
  });
  return {signal_grid, herald_grid, std::move(m)};
}

JointSpectralAmplitude build_rotated_gaussian_jsa(double sigma_sum, double sigma_diff,
                                                  double signal_center, double herald_center,
                                                  const FrequencyGrid& signal_grid,
                                                  const FrequencyGrid& herald_grid,
                                                  Truncation truncation) {
  if (!(sigma_sum > 0.0) || !(sigma_diff > 0.0)) {
    throw DomainError("build_rotated_gaussian_jsa: sigmas must be positive");
  }
  if (truncation == Truncation::kCheck) {
    // Marginal amplitude widths of the rotated envelope.
    const double marginal = std::max(sigma_sum, sigma_diff);
    check_edges(marginal, signal_center, signal_grid, "build_rotated_gaussian_jsa (signal)");
    check_edges(marginal, herald_center, herald_grid, "build_rotated_gaussian_jsa (herald)");
  }
  auto m = tabulate(signal_grid, herald_grid, [&](double ws, double wi) {
    const double x = ws - signal_center;
    const double y = wi - herald_center;
    const double u = (x + y) / std::numbers::sqrt2 / sigma_sum;
    const double v = (x - y) / std::numbers::sqrt2 / sigma_diff;
    return std::complex<double>(std::exp(-0.5 * (u * u + v * v)), 0.0);
  });
  return {signal_grid, herald_grid, std::move(m)};
}

std::vector<double> schmidt_coefficients(const JointSpectralAmplitude& jsa) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(jsa.weighted_matrix());
  if (svd.info() != Eigen::Success) throw NumericError("schmidt_coefficients: SVD did not converge");
  const auto& s = svd.singularValues();
  std::vector<double> lambda(static_cast<std::size_t>(s.size()));
  double total = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    lambda[k] = s(k) * s(k);
    total += lambda[k];
  }
  for (double& l : lambda) l /= total;
  return lambda;
}

double schmidt_purity(const JointSpectralAmplitude& jsa) {
  double p = 0.0;
  for (double l : schmidt_coefficients(jsa)) p += l * l;
  return p;
}

double SpectralWindow::transmission(double w) const {
  return std::visit(
      [w](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AllPass>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, TopHat>) {
          const double d = std::abs(w - s.center) - 0.5 * s.width;
          const double edge_tol = 1e-9 * s.width;
          if (std::abs(d) <= edge_tol) return std::numbers::sqrt2 / 2.0;
          return d < 0.0 ? 1.0 : 0.0;
        } else {
          const double x = (w - s.center) / s.sigma;
          return std::exp(-0.25 * x * x);
        }
      },
      shape);
}

FilterResult apply_filter(const JointSpectralAmplitude& jsa, const SpectralWindow& window) {
  if (const auto* th = std::get_if<TopHat>(&window.shape); th && !(th->width > 0.0)) {
    throw DomainError("apply_filter: top-hat width must be positive");
  }
  if (const auto* g = std::get_if<GaussianPass>(&window.shape); g && !(g->sigma > 0.0)) {
    throw DomainError("apply_filter: Gaussian window sigma must be positive");
  }
  Eigen::MatrixXcd m = jsa.amplitude();
  const bool signal = window.axis == Axis::kSignal;
  const auto& grid = signal ? jsa.signal_grid() : jsa.herald_grid();
  for (std::size_t k = 0; k < grid.points(); ++k) {
    const double t = window.transmission(grid[k]);
    if (signal) {
      m.row(static_cast<Eigen::Index>(k)) *= t;
    } else {
      m.col(static_cast<Eigen::Index>(k)) *= t;
    }
  }
  // Input is unit norm, so the surviving weighted norm is the transmission.
  const auto ws = jsa.signal_grid().trapezoid_weights();
  const auto wh = jsa.herald_grid().trapezoid_weights();
  double kept = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) kept += ws[i] * wh[j] * std::norm(m(i, j));
  }
  if (!(kept > std::numeric_limits<double>::min())) {
    throw ZeroOverlapError("apply_filter: window removes all amplitude");
  }
  return {JointSpectralAmplitude(jsa.signal_grid(), jsa.herald_grid(), std::move(m)), kept};
}

void write_jsa(std::ostream& out, const JointSpectralAmplitude& jsa) {
  const auto& s = jsa.signal_grid();
  const auto& h = jsa.herald_grid();
  out << std::setprecision(17);
  out << "# freqmux-jsa 1\n";
  out << "# signal_center " << s.center() << "\n";
  out << "# signal_span " << s.span() << "\n";
  out << "# signal_points " << s.points() << "\n";
  out << "# herald_center " << h.center() << "\n";
  out << "# herald_span " << h.span() << "\n";
  out << "# herald_points " << h.points() << "\n";
  out << "# columns omega_s omega_i re im\n";
  for (std::size_t i = 0; i < s.points(); ++i) {
    for (std::size_t j = 0; j < h.points(); ++j) {
      const auto z = jsa.amplitude()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << s[i] << ' ' << h[j] << ' ' << z.real() << ' ' << z.imag() << '\n';
    }
  }
}

JointSpectralAmplitude read_jsa(std::istream& in) {
  std::map<std::string, std::string> header;
  std::string line;
  while (in.peek() == '#' && std::getline(in, line)) {
    std::istringstream ls(line.substr(1));
    std::string key, value;
    ls >> key >> value;
    header[key] = value;
  }
  if (header.count("freqmux-jsa") == 0) throw DomainError("read_jsa: missing format tag");
  auto num = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end()) throw DomainError(std::string("read_jsa: missing header ") + key);
    return std::stod(it->second);
  };
  const FrequencyGrid s(num("signal_center"), num("signal_span"),
                        static_cast<std::size_t>(num("signal_points")));
  const FrequencyGrid h(num("herald_center"), num("herald_span"),
                        static_cast<std::size_t>(num("herald_points")));
  Eigen::MatrixXcd m(s.points(), h.points());
  for (std::size_t i = 0; i < s.points(); ++i) {
    for (std::size_t j = 0; j < h.points(); ++j) {
      double ws, wi, re, im;
      if (!(in >> ws >> wi >> re >> im)) throw DomainError("read_jsa: truncated data");
      const double tol = 1e-6 * std::min(s.spacing(), h.spacing());
      if (std::abs(ws - s[i]) > tol || std::abs(wi - h[j]) > tol) {
        throw DomainError("read_jsa: row frequencies disagree with header grid");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {re, im};
    }
  }
  return {s, h, std::move(m)};
}

}  // namespace freqmux::spectral
