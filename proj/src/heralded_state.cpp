#include "freqmux/heralded_state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <ostream>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"
#include "freqmux/units.hpp"

namespace freqmux::heralded {
namespace {

// Relative slack when deciding whether a bin center sits inside the span.
constexpr double kEdgeSlack = 1e-9;
constexpr double kVacuousTransmission = 1e-12;

double marginal_density(const HeraldedStateModel& model, double w) {
  if (!model.herald_marginal_sigma) return 1.0;
  const double x = (w - model.herald_center()) / *model.herald_marginal_sigma;
  return std::exp(-0.5 * x * x);
}

unsigned workers_for(const QuadratureOptions& q) {
  return q.workers == 0 ? numerics::default_workers() : q.workers;
}

}  // namespace

QuadratureOptions QuadratureOptions::refined() const {
  QuadratureOptions r = *this;
  r.signal_points = 2 * signal_points - 1;
  r.herald_points = 2 * herald_points - 1;
  r.posterior_points = 2 * posterior_points - 1;
  return r;
}

double HeraldedStateModel::acceptance_span() const {
  return shift_range ? std::min(herald_span, *shift_range) : herald_span;
}

void HeraldedStateModel::validate() const {
  if (!(filter_width > 0.0)) throw DomainError("filter width must be positive");
  if (!(filter_center > 0.0) || !(pump.center > filter_center)) {
    throw DomainError("frequencies must be positive with the pump above the signal");
  }
  if (!std::isfinite(gvd)) throw DomainError("gvd must be finite");
  if (!(herald_span >= 0.0)) throw DomainError("herald span must be >= 0");
  if (shift_range && !(*shift_range >= 0.0)) throw DomainError("shift range must be >= 0");
  if (herald_marginal_sigma && !(*herald_marginal_sigma > 0.0)) {
    throw DomainError("herald marginal sigma must be positive");
  }
  if (quadrature.signal_points < 3 || quadrature.herald_points < 2 ||
      quadrature.posterior_points < 3 || !(quadrature.posterior_sigmas > 0.0)) {
    throw DomainError("quadrature too coarse");
  }
}

spectral::FrequencyGrid signal_grid(const HeraldedStateModel& model) {
  return {model.filter_center, model.filter_width, model.quadrature.signal_points};
}

ConditionalWavepacket conditional_wavepacket(double herald_outcome, double herald_true,
                                             const HeraldedStateModel& model) {
  auto grid = signal_grid(model);
  const auto tw = grid.trapezoid_weights();
  const double s = model.pump.sigma;
  const double h = herald_outcome - model.herald_center();
  const double offset = herald_true - herald_outcome;
  const double pre = model.filter_center - model.gvd_reference.value_or(model.filter_center);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(grid.points()));
  double norm = 0.0;
  for (std::size_t j = 0; j < grid.points(); ++j) {
    const double u = grid[j] - model.filter_center;
    const double x = (u + offset) / s;
    const double mag = std::exp(-0.5 * x * x);
    const double v = pre + u - h;
    a[static_cast<Eigen::Index>(j)] = std::polar(mag, model.gvd * v * v);
    norm += tw[j] * mag * mag;
  }
  const double transmission = norm / (s * std::sqrt(std::numbers::pi));
  if (!(transmission > kVacuousTransmission)) {
    throw VacuousEventError("output filter removes the conditional wavepacket");
  }
  a /= std::sqrt(norm);
  return {herald_outcome, herald_true, grid, std::move(a), transmission};
}

HeraldMixture herald_mixture(const HeraldedStateModel& model) {
  model.validate();
  HeraldMixture m;
  const double hc = model.herald_center();
  const double span = model.acceptance_span();

  if (!model.spectrometer) {
    if (span == 0.0) {
      m.outcome = {hc};
      m.herald = {hc};
      m.weight = {1.0};
      m.outcome_count = 1;
      return m;
    }
    spectral::FrequencyGrid g(hc, span, model.quadrature.herald_points);
    const auto tw = g.trapezoid_weights();
    for (std::size_t i = 0; i < g.points(); ++i) {
      m.outcome.push_back(g[i]);
      m.herald.push_back(g[i]);
      m.weight.push_back(tw[i] * marginal_density(model, g[i]));
    }
    m.outcome_count = g.points();
  } else {
    const auto& sp = *model.spectrometer;
    std::vector<std::int64_t> bins;
    if (span == 0.0) {
      bins.push_back(sp.frequency_to_bin(hc));
    } else {
      std::int64_t a = sp.frequency_to_bin(hc - 0.5 * span);
      std::int64_t b = sp.frequency_to_bin(hc + 0.5 * span);
      if (a > b) std::swap(a, b);
      for (std::int64_t k = a - 1; k <= b + 1; ++k) {
        if (std::abs(sp.bin_frequency(k) - hc) <= 0.5 * span * (1.0 + kEdgeSlack)) bins.push_back(k);
      }
    }
    const double radius = std::max(model.quadrature.posterior_sigmas * sp.frequency_uncertainty(),
                                   (sp.jitter().support_radius() + sp.tdc_bin()) /
                                       std::abs(sp.dispersion()));
    for (std::int64_t k : bins) {
      const double wh = sp.bin_frequency(k);
      spectral::FrequencyGrid g(wh, 2.0 * radius, model.quadrature.posterior_points);
      const auto tw = g.trapezoid_weights();
      std::vector<double> prior(g.points());
      double evidence = 0.0;
      for (std::size_t i = 0; i < g.points(); ++i) {
        prior[i] = tw[i] * marginal_density(model, g[i]);
        evidence += prior[i] * sp.outcome_probability(k, g[i]);
      }
      const double total = numerics::pairwise_sum(prior);
      for (double& p : prior) p /= total;
      const auto post = spectrometer::herald_posterior(sp, k, g, prior);
      for (std::size_t i = 0; i < g.points(); ++i) {
        if (post[i] == 0.0) continue;
        m.outcome.push_back(wh);
        m.herald.push_back(g[i]);
        m.weight.push_back(evidence * post[i]);
      }
    }
    m.outcome_count = bins.size();
  }
  const double total = numerics::pairwise_sum(m.weight);
  if (!(total > 0.0)) throw ZeroEvidenceError("no accepted herald outcome carries weight");
  for (double& w : m.weight) w /= total;
  return m;
}

WavepacketStack wavepacket_stack(const HeraldedStateModel& model) {
  const auto mix = herald_mixture(model);
  const auto grid = signal_grid(model);
  const auto tw = grid.trapezoid_weights();
  const std::size_t terms = mix.weight.size();
  WavepacketStack st{grid, simd::ComplexRows(terms, grid.points()), mix.weight};
  std::vector<char> vacuous(terms, 0);
  numerics::parallel_for(terms, workers_for(model.quadrature), [&](std::size_t k) {
    try {
      const auto wp = conditional_wavepacket(mix.outcome[k], mix.herald[k], model);
      double* re = st.rows.row_re(k);
      double* im = st.rows.row_im(k);
      for (std::size_t j = 0; j < grid.points(); ++j) {
        const auto z = wp.amplitude[static_cast<Eigen::Index>(j)] * std::sqrt(tw[j]);
        re[j] = z.real();
        im[j] = z.imag();
      }
    } catch (const VacuousEventError&) {
      vacuous[k] = 1;
    }
  });
  for (std::size_t k = 0; k < terms; ++k) {
    if (vacuous[k]) st.weights[k] = 0.0;
  }
  const double total = numerics::pairwise_sum(st.weights);
  if (!(total > 0.0)) throw VacuousEventError("every herald outcome is vacuous");
  for (double& w : st.weights) w /= total;
  return st;
}

double DiscretizedDensityMatrix::trace() const { return matrix.trace().real(); }

double DiscretizedDensityMatrix::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DiscretizedDensityMatrix::purity() const { return matrix.cwiseAbs2().sum(); }

Eigen::VectorXd DiscretizedDensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("density matrix eigensolver failed");
  return es.eigenvalues();
}

double DiscretizedDensityMatrix::eigen_purity() const { return eigenvalues().squaredNorm(); }

void DiscretizedDensityMatrix::write(std::ostream& out) const {
  const auto tw = grid.trapezoid_weights();
  const auto old = out.precision(17);
  out << "# freqmux-density 1\n# center " << grid.center() << "\n# span " << grid.span()
      << "\n# points " << grid.points() << "\n# i j re im\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const auto z = matrix(i, j) / std::sqrt(tw[static_cast<std::size_t>(i)] *
                                              tw[static_cast<std::size_t>(j)]);
      out << i << ' ' << j << ' ' << z.real() << ' ' << z.imag() << '\n';
    }
  }
  out.precision(old);
}

DiscretizedDensityMatrix assemble_density_matrix(const HeraldedStateModel& model) {
  const auto st = wavepacket_stack(model);
  const std::size_t n = st.grid.points();
  std::vector<double> re(n * n, 0.0), im(n * n, 0.0);
  for (std::size_t k = 0; k < st.weights.size(); ++k) {
    if (st.weights[k] == 0.0) continue;
    simd::hermitian_rank1_update(re, im, st.rows.row(k), st.weights[k]);
  }
  DiscretizedDensityMatrix d{st.grid, Eigen::MatrixXcd(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {re[i * n + j],
                                                                              im[i * n + j]};
    }
  }
  return d;
}

namespace {

double purity_once(const HeraldedStateModel& model) {
  const auto st = wavepacket_stack(model);
  const std::size_t terms = st.weights.size();
  const std::span<const double> w(st.weights);
  std::vector<double> partial(terms, 0.0);
  numerics::parallel_for(terms, workers_for(model.quadrature), [&](std::size_t k) {
    if (w[k] == 0.0) return;
    const auto a = st.rows.row(k);
    const double self = simd::norm_sq(a);
    const std::size_t rest = terms - k - 1;
    const double cross =
        rest == 0 ? 0.0 : simd::weighted_overlap_sum(a, st.rows, k + 1, rest, w.subspan(k + 1));
    partial[k] = w[k] * (w[k] * self * self + 2.0 * cross);
  });
  return numerics::pairwise_sum(partial);
}

}  // namespace

double purity_integral(const HeraldedStateModel& model, const PurityOptions& options) {
  const double p = purity_once(model);
  if (options.check_refinement) {
    HeraldedStateModel fine = model;
    fine.quadrature = model.quadrature.refined();
    const double change = std::abs(purity_once(fine) - p);
    if (change > options.refinement_tolerance) {
      throw ConvergenceError("purity_integral: refinement changed the result", change);
    }
  }
  return p;
}

double gvd_parameter(double dispersion_ps_nm_km, double length_m, double wavelength_m) {
  if (!(length_m > 0.0) || !(wavelength_m > 0.0)) {
    throw DomainError("gvd_parameter: length and wavelength must be positive");
  }
  // ps/(nm km) -> s/m^2
  const double d = dispersion_ps_nm_km * 1e-12 / (1e-9 * 1e3);
  const double beta2 = -d * wavelength_m * wavelength_m / (units::kTwoPi * units::kSpeedOfLight);
  return 0.5 * beta2 * length_m;
}

}  // namespace freqmux::heralded
