#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stcox/geomtime.hpp"
#include "stcox/mcmc.hpp"

namespace stcox {

/// Sample autocorrelations rho_0 .. rho_max_lag.
std::vector<double> autocorrelation(std::span<const double> trace, std::size_t max_lag);

/// 1 + 2 sum_{s=1}^{S} rho_s with S from Geyer's initial positive sequence
/// (pairs rho_{2k} + rho_{2k+1} summed while positive, the first pair always).
/// Clamped at 0; NaN for a constant trace or fewer than 4 values.
double inefficiency_factor(std::span<const double> trace);

struct NamedTrace {
  std::string name;
  std::vector<double> values;
};

/// One trace per sampled quantity plus the products sigma2*phi_s and
/// sigma2*phi_t for LGCP chains.
std::vector<NamedTrace> parameter_traces(const PosteriorChain& chain);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double lower = 0.0;  // 2.5%
  double upper = 0.0;  // 97.5%
  double inefficiency = 0.0;
  std::optional<double> truth;

  bool covers_truth() const { return truth && *truth >= lower && *truth <= upper; }
};

std::vector<ParameterSummary> summarize(const PosteriorChain& chain, const std::map<std::string, double>& truth = {});

/// Truth values keyed like parameter_traces.
std::map<std::string, double> truth_map(const ModelState& state);

struct WeekdayPanel {
  int weekday_class = 0;
  ParameterSummary expected_total;  // sum_j lambda_{j,w} Delta_j
  ParameterSummary delta;
};

std::vector<WeekdayPanel> weekday_panels(const PosteriorChain& chain, const SpaceTimeGrid& grid);

struct SurfaceCell {
  std::size_t cell = 0;
  PlanarPoint centroid;
  double time = 0.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Posterior of lambda per space-time cell, averaged over weekday classes.
std::vector<SurfaceCell> intensity_surface(const PosteriorChain& chain, const SpaceTimeGrid& grid);

}  // namespace stcox
