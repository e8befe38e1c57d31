#include "stcox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stcox/errors.hpp"
#include "stcox/stats.hpp"

namespace stcox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ParameterSummary summarize_trace(std::string name, std::span<const double> values) {
  ParameterSummary s;
  s.name = std::move(name);
  if (values.empty()) {
    s.mean = s.lower = s.upper = s.inefficiency = kNaN;
    return s;
  }
  s.mean = mean(values);
  const Interval ci = central_interval(values, 0.95);
  s.lower = ci.lower;
  s.upper = ci.upper;
  s.inefficiency = inefficiency_factor(values);
  return s;
}

std::string indexed(const std::string& base, std::size_t i, std::size_t n) {
  return n == 1 ? base : base + std::to_string(i + 1);
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> trace, std::size_t max_lag) {
  const std::size_t n = trace.size();
  const double m = mean(trace);
  double c0 = 0.0;
  for (double v : trace) c0 += (v - m) * (v - m);
  std::vector<double> rho(std::min(max_lag, n ? n - 1 : 0) + 1, kNaN);
  if (c0 <= 0.0) return rho;
  for (std::size_t s = 0; s < rho.size(); ++s) {
    double c = 0.0;
    for (std::size_t i = 0; i + s < n; ++i) c += (trace[i] - m) * (trace[i + s] - m);
    rho[s] = c / c0;
  }
  return rho;
}

double inefficiency_factor(std::span<const double> trace) {
  const std::size_t n = trace.size();
  if (n < 4) return kNaN;
  const double m = mean(trace);
  double c0 = 0.0;
  for (double v : trace) c0 += (v - m) * (v - m);
  if (!(c0 > 0.0)) return kNaN;
  auto rho = [&](std::size_t s) {
    double c = 0.0;
    for (std::size_t i = 0; i + s < n; ++i) c += (trace[i] - m) * (trace[i + s] - m);
    return c / c0;
  };
  double sum = 1.0 + rho(1);  // first pair
  for (std::size_t k = 1; 2 * k + 1 < n; ++k) {
    const double pair = rho(2 * k) + rho(2 * k + 1);
    if (!(pair > 0.0)) break;
    sum += pair;
  }
  return std::max(0.0, 2.0 * sum - 1.0);
}

std::vector<NamedTrace> parameter_traces(const PosteriorChain& chain) {
  std::vector<NamedTrace> out;
  const auto& draws = chain.draws;
  const std::size_t k = chain.landmarks.size();
  const auto w = static_cast<std::size_t>(chain.weekday_classes);
  auto add = [&](std::string name, auto getter) {
    NamedTrace t{std::move(name), {}};
    t.values.reserve(draws.size());
    for (const auto& d : draws) t.values.push_back(getter(d));
    out.push_back(std::move(t));
  };
  const auto& fixed = chain.options.fixed;
  auto sampled = [&fixed](Param p) { return fixed.count(p) == 0; };

  if (sampled(Param::Beta)) {
    for (std::size_t i = 0; i < k; ++i) add("beta" + std::to_string(i + 1), [i](const Draw& d) { return d.beta[i]; });
  }
  if (chain.variant == ModelVariant::Nhpp && sampled(Param::Rho)) {
    for (std::size_t i = 0; i < k; ++i) add("rho" + std::to_string(i + 1), [i](const Draw& d) { return d.rho[i]; });
  }
  for (std::size_t c = 0; c < w; ++c) {
    if (sampled(Param::Mu)) add(indexed("mu", c, w), [c](const Draw& d) { return d.mu[c]; });
    if (sampled(Param::Delta)) add(indexed("delta", c, w), [c](const Draw& d) { return d.delta[c]; });
  }
  if (is_lgcp(chain.variant)) {
    if (sampled(Param::Sigma2)) add("sigma2", [](const Draw& d) { return d.cov.sigma2; });
    if (sampled(Param::PhiS)) add("phi_s", [](const Draw& d) { return d.cov.phi_s; });
    if (sampled(Param::PhiT)) add("phi_t", [](const Draw& d) { return d.cov.phi_t; });
    if (chain.variant == ModelVariant::LgcpNonseparable && sampled(Param::Gamma)) {
      add("gamma", [](const Draw& d) { return d.cov.gamma; });
    }
    add("sigma2_phi_s", [](const Draw& d) { return d.cov.sigma2 * d.cov.phi_s; });
    add("sigma2_phi_t", [](const Draw& d) { return d.cov.sigma2 * d.cov.phi_t; });
  }
  return out;
}

std::map<std::string, double> truth_map(const ModelState& state) {
  std::map<std::string, double> t;
  for (std::size_t i = 0; i < state.beta.size(); ++i) t["beta" + std::to_string(i + 1)] = state.beta[i];
  for (std::size_t i = 0; i < state.landmarks.size(); ++i) t["rho" + std::to_string(i + 1)] = state.landmarks[i].rho;
  const std::size_t w = state.temporal.classes();
  for (std::size_t c = 0; c < w; ++c) {
    t[indexed("mu", c, w)] = state.temporal.mu[c];
    t[indexed("delta", c, w)] = state.temporal.delta[c];
  }
  if (is_lgcp(state.variant)) {
    t["sigma2"] = state.cov.sigma2;
    t["phi_s"] = state.cov.phi_s;
    t["phi_t"] = state.cov.phi_t;
    t["gamma"] = state.cov.gamma;
    t["sigma2_phi_s"] = state.cov.sigma2 * state.cov.phi_s;
    t["sigma2_phi_t"] = state.cov.sigma2 * state.cov.phi_t;
  }
  return t;
}

std::vector<ParameterSummary> summarize(const PosteriorChain& chain, const std::map<std::string, double>& truth) {
  std::vector<ParameterSummary> out;
  for (const auto& t : parameter_traces(chain)) {
    auto s = summarize_trace(t.name, t.values);
    if (auto it = truth.find(t.name); it != truth.end()) s.truth = it->second;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<WeekdayPanel> weekday_panels(const PosteriorChain& chain, const SpaceTimeGrid& grid) {
  const int classes = grid.weekday_classes();
  std::vector<WeekdayPanel> out;
  for (int w = 0; w < classes; ++w) {
    std::vector<double> totals;
    std::vector<double> deltas;
    for (const auto& d : chain.draws) {
      if (static_cast<std::size_t>(d.log_base.size()) != grid.n_cells()) {
        throw InputError("chain draws do not carry intensity surfaces");
      }
      const TemporalParams tp{d.mu, d.delta};
      double total = 0.0;
      for (std::size_t j = 0; j < grid.n_cells(); ++j) {
        total += std::exp(d.log_base[static_cast<Eigen::Index>(j)]) * grid.volume(j) *
                 kappa(grid.time_cells()[grid.time_of(j)].centroid, w, tp);
      }
      totals.push_back(total);
      deltas.push_back(d.delta[static_cast<std::size_t>(w)]);
    }
    const std::string label = classes == 1 ? "all" : to_string(static_cast<Weekday>(w));
    out.push_back({w, summarize_trace("expected_total_" + label, totals), summarize_trace("delta_" + label, deltas)});
  }
  return out;
}

std::vector<SurfaceCell> intensity_surface(const PosteriorChain& chain, const SpaceTimeGrid& grid) {
  const std::size_t cells = grid.n_cells();
  const int classes = grid.weekday_classes();
  std::vector<std::vector<double>> values(cells);
  for (const auto& d : chain.draws) {
    if (static_cast<std::size_t>(d.log_base.size()) != cells) {
      throw InputError("chain draws do not carry intensity surfaces");
    }
    const TemporalParams tp{d.mu, d.delta};
    for (std::size_t j = 0; j < cells; ++j) {
      const double t = grid.time_cells()[grid.time_of(j)].centroid;
      double k = 0.0;
      for (int w = 0; w < classes; ++w) k += kappa(t, w, tp);
      values[j].push_back(std::exp(d.log_base[static_cast<Eigen::Index>(j)]) * k / classes);
    }
  }
  std::vector<SurfaceCell> out;
  out.reserve(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    SurfaceCell c;
    c.cell = j;
    c.centroid = grid.spatial_cells()[grid.spatial_of(j)].centroid;
    c.time = grid.time_cells()[grid.time_of(j)].centroid;
    if (values[j].empty()) {
      c.mean = c.lower = c.upper = kNaN;
    } else {
      c.mean = mean(values[j]);
      const Interval ci = central_interval(values[j], 0.95);
      c.lower = ci.lower;
      c.upper = ci.upper;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace stcox
