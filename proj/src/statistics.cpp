#include "freqmux/statistics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "freqmux/errors.hpp"
#include "freqmux/numerics.hpp"

namespace freqmux::stats {
namespace {

constexpr std::uint64_t kBlockPulses = 1u << 16;
constexpr double kExpansionLimit = 0.1;

// Indices into the event tallies below.
enum Event { kH, kS, kSH, kS1S2H, kS1H, kS2H, kEventCount };
using EventProbabilities = std::array<double, kEventCount>;

double binomial_pmf(int n, int k, double p) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Exact event probabilities given pair numbers per mode, averaging over
// thinning, routing and the output beam splitter.
EventProbabilities exact_events(const std::vector<int>& pairs, double eta_s, double eta_h) {
  EventProbabilities out{};
  const std::size_t m = pairs.size();
  std::vector<int> herald(m, 0), signal(m, 0);

  // Recursive walk over (herald, signal) photon numbers for each mode.
  auto walk = [&](auto&& self, std::size_t i, double prob) -> void {
    if (prob == 0.0) return;
    if (i == m) {
      std::vector<std::size_t> clicked;
      for (std::size_t j = 0; j < m; ++j) {
        if (herald[j] > 0) clicked.push_back(j);
      }
      const bool h = !clicked.empty();
      auto accumulate = [&](int o, double w) {
        if (o <= 0) return;
        const double miss = std::pow(0.5, o);
        const double p_s1 = 1.0 - miss;
        const double p_both = 1.0 - 2.0 * miss;
        out[kS] += w;
        if (h) {
          out[kSH] += w;
          out[kS1H] += w * p_s1;
          out[kS2H] += w * p_s1;
          out[kS1S2H] += w * p_both;
        }
      };
      if (h) {
        out[kH] += prob;
        for (std::size_t r : clicked) accumulate(signal[r], prob / static_cast<double>(clicked.size()));
      } else {
        accumulate(signal[0], prob);
      }
      return;
    }
    for (int a = 0; a <= pairs[i]; ++a) {
      for (int b = 0; b <= pairs[i]; ++b) {
        herald[i] = a;
        signal[i] = b;
        self(self, i + 1,
             prob * binomial_pmf(pairs[i], a, eta_h) * binomial_pmf(pairs[i], b, eta_s));
      }
    }
  };
  walk(walk, 0, 1.0);
  return out;
}

double thermal_pmf(double mean, int n) {
  return std::pow(mean, n) / std::pow(1.0 + mean, n + 1);
}

}  // namespace

void MultiplexedStatisticsModel::validate() const {
  if (!(n_modes >= 1.0) || !std::isfinite(n_modes)) throw DomainError("n_modes must be >= 1");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be >= 0");
  if (!(eta_s >= 0.0 && eta_s <= 1.0)) throw DomainError("eta_s must lie in [0, 1]");
  if (!(eta_h >= 0.0 && eta_h <= 1.0)) throw DomainError("eta_h must lie in [0, 1]");
}

std::size_t MultiplexedStatisticsModel::mode_slots() const {
  if (!multiplexing_enabled) return 1;
  return static_cast<std::size_t>(std::ceil(n_modes - 1e-12));
}

double MultiplexedStatisticsModel::mode_mean(std::size_t i) const {
  if (!multiplexing_enabled) return mu;
  const double full = std::floor(n_modes + 1e-12);
  if (static_cast<double>(i) < full) return mu;
  return mu * (n_modes - full);
}

double effective_mode_count(double shift_range_hz, double photon_bandwidth_hz) {
  if (!(shift_range_hz > 0.0) || !(photon_bandwidth_hz > 0.0)) {
    throw DomainError("effective_mode_count: arguments must be positive");
  }
  return shift_range_hz / photon_bandwidth_hz;
}

namespace {

CountingResult finish(CountingResult r) {
  const double denom = r.p_s1h.value * r.p_s2h.value;
  r.g2_h.value = denom > 0.0 ? r.p_s1s2h.value * r.p_h.value / denom
                             : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

CountingResult analytic_counting(const MultiplexedStatisticsModel& model) {
  model.validate();
  const std::size_t m = model.mode_slots();
  const double load = model.mu * (model.multiplexing_enabled ? model.n_modes : 1.0);
  if (!(load < kExpansionLimit)) {
    throw DomainError("analytic_counting: small-squeezing expansion needs mu * N < 0.1");
  }
  std::vector<double> mean(m);
  for (std::size_t i = 0; i < m; ++i) {
    mean[i] = model.mode_mean(i);
  }
  EventProbabilities total{};
  auto add = [&](const std::vector<int>& pairs) {
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) p *= thermal_pmf(mean[i], pairs[i]);
    if (p == 0.0) return;
    const auto e = exact_events(pairs, model.eta_s, model.eta_h);
    for (int k = 0; k < kEventCount; ++k) total[k] += p * e[k];
  };
  std::vector<int> pairs(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (int n = 1; n <= 2; ++n) {
      pairs[i] = n;
      add(pairs);
    }
    pairs[i] = 1;
    for (std::size_t j = i + 1; j < m; ++j) {
      pairs[j] = 1;
      add(pairs);
      pairs[j] = 0;
    }
    pairs[i] = 0;
  }
  CountingResult r;
  r.analytic = true;
  r.p_h.value = total[kH];
  r.p_s.value = total[kS];
  r.p_sh.value = total[kSH];
  r.p_s1s2h.value = total[kS1S2H];
  r.p_s1h.value = total[kS1H];
  r.p_s2h.value = total[kS2H];
  return finish(r);
}

CountingResult counting_from_counts(const EventCounts& c, std::uint64_t pulses) {
  if (pulses == 0) throw DomainError("counting_from_counts: no pulses");
  const double n = static_cast<double>(pulses);
  auto est = [n](std::uint64_t k) {
    const double p = static_cast<double>(k) / n;
    return Estimate{p, std::sqrt(p * (1.0 - p) / n)};
  };
  CountingResult r;
  r.pulses = pulses;
  r.p_h = est(c.h);
  r.p_s = est(c.s);
  r.p_sh = est(c.sh);
  r.p_s1s2h = est(c.s1s2h);
  r.p_s1h = est(c.s1h);
  r.p_s2h = est(c.s2h);
  r = finish(r);
  if (c.s1h > 0 && c.s2h > 0) {
    // Counts treated as independent Poisson variables.
    const double inv = (c.s1s2h > 0 ? 1.0 / static_cast<double>(c.s1s2h) : 1.0) +
                       1.0 / static_cast<double>(c.h) + 1.0 / static_cast<double>(c.s1h) +
                       1.0 / static_cast<double>(c.s2h);
    const double scale = c.s1s2h > 0 ? r.g2_h.value
                                     : static_cast<double>(c.h) /
                                           (static_cast<double>(c.s1h) * static_cast<double>(c.s2h));
    r.g2_h.std_error = scale * std::sqrt(inv);
  } else {
    r.g2_h.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

CountingResult monte_carlo_counting(const MultiplexedStatisticsModel& model, std::uint64_t pulses,
                                    const CounterRng& rng, unsigned workers) {
  model.validate();
  const std::size_t m = model.mode_slots();
  std::vector<double> success(m);
  for (std::size_t i = 0; i < m; ++i) success[i] = 1.0 / (1.0 + model.mode_mean(i));
  const std::uint64_t blocks = (pulses + kBlockPulses - 1) / kBlockPulses;
  std::vector<EventCounts> partial(blocks);

  numerics::parallel_for(blocks, workers == 0 ? numerics::default_workers() : workers,
                         [&](std::size_t b) {
    CounterRng local = rng.split(b);
    const std::uint64_t begin = b * kBlockPulses;
    const std::uint64_t end = std::min<std::uint64_t>(pulses, begin + kBlockPulses);
    std::vector<std::geometric_distribution<int>> pair_dist;
    for (std::size_t i = 0; i < m; ++i) pair_dist.emplace_back(success[i]);
    std::vector<int> signal(m);
    std::vector<std::size_t> clicked;
    clicked.reserve(m);
    EventCounts c;
    for (std::uint64_t p = begin; p < end; ++p) {
      clicked.clear();
      bool any = false;
      for (std::size_t i = 0; i < m; ++i) {
        const int n = pair_dist[i](local);
        signal[i] = 0;
        if (n == 0) continue;
        any = true;
        if (std::binomial_distribution<int>(n, model.eta_h)(local) > 0) clicked.push_back(i);
        signal[i] = std::binomial_distribution<int>(n, model.eta_s)(local);
      }
      if (!any) continue;
      const bool h = !clicked.empty();
      std::size_t routed = 0;
      if (clicked.size() == 1) {
        routed = clicked[0];
      } else if (clicked.size() > 1) {
        routed = clicked[std::uniform_int_distribution<std::size_t>(0, clicked.size() - 1)(local)];
      }
      const int o = signal[routed];
      c.h += h;
      if (o == 0) continue;
      const int k1 = std::binomial_distribution<int>(o, 0.5)(local);
      const bool s1 = k1 > 0;
      const bool s2 = o - k1 > 0;
      c.s += 1;
      if (h) {
        c.sh += 1;
        c.s1h += s1;
        c.s2h += s2;
        c.s1s2h += s1 && s2;
      }
    }
    partial[b] = c;
  });

  EventCounts total;
  for (const auto& c : partial) {
    total.h += c.h;
    total.s += c.s;
    total.sh += c.sh;
    total.s1s2h += c.s1s2h;
    total.s1h += c.s1h;
    total.s2h += c.s2h;
  }
  auto r = counting_from_counts(total, pulses);
  r.seed = rng.seed();
  return r;
}

ArmEfficiencies klyshko_efficiencies(const CountingResult& counts) {
  if (!(counts.p_h.value > 0.0) || !(counts.p_s.value > 0.0)) {
    throw DomainError("klyshko_efficiencies: singles rates must be positive");
  }
  return {counts.p_sh.value / counts.p_h.value, counts.p_sh.value / counts.p_s.value};
}

double hom_visibility(double purity, double g2_h) {
  if (!(purity > 0.0 && purity <= 1.0)) throw DomainError("hom_visibility: purity must lie in (0, 1]");
  if (!(g2_h >= 0.0)) throw DomainError("hom_visibility: g2 must be >= 0");
  return purity * (1.0 - g2_h);
}

std::vector<double> hom_dip_curve(double purity, double g2_h, double photon_sigma,
                                  const std::vector<double>& delays) {
  if (!(photon_sigma > 0.0)) throw DomainError("hom_dip_curve: bandwidth must be positive");
  const double v = hom_visibility(purity, g2_h);
  const double s = photon_sigma / std::numbers::sqrt2;
  std::vector<double> r(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    const double x = s * delays[i];
    r[i] = 1.0 - v * std::exp(-x * x);
  }
  return r;
}

void write_counting_header(std::ostream& out) {
  out << "config_hash,n_modes,mu,eta_s,eta_h,multiplexed,p_h,p_sh,p_sh_se,g2_h,g2_h_se,pulses,seed\n";
}

void write_counting_row(std::ostream& out, const std::string& config_hash,
                        const MultiplexedStatisticsModel& model, const CountingResult& r) {
  const auto old = out.precision(10);
  out << config_hash << ',' << model.n_modes << ',' << model.mu << ',' << model.eta_s << ','
      << model.eta_h << ',' << (model.multiplexing_enabled ? 1 : 0) << ',' << r.p_h.value << ','
      << r.p_sh.value << ',' << r.p_sh.std_error << ',' << r.g2_h.value << ','
      << r.g2_h.std_error << ',' << r.pulses << ',' << r.seed << '\n';
  out.precision(old);
}

}  // namespace freqmux::stats
