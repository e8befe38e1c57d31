#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "stcox/geomtime.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/model.hpp"
#include "stcox/random.hpp"

namespace stcox {

inline constexpr double kMaxCellMean = 1e9;

struct SimConfig {
  ModelState truth;  // for LGCP variants a missing field is drawn from the prior
  SpaceTimeGrid grid;
  std::uint64_t seed = 0;
  bool emit_exact_points = false;
};

struct SimResult {
  SpaceTimeGrid grid;  // cfg.grid carrying the simulated counts
  Eigen::VectorXd z;   // field used, empty for the NHPP
  std::optional<std::vector<EventRecord>> points;
};

/// Returns false to have a placed point redrawn.
using PointFilter = std::function<bool(const EventRecord&, const CellIndex&)>;

/// Counts n[j][w] ~ Poisson(lambda_{j,w} Delta_j) with one field shared by all
/// weekday classes.  Throws NumericalError when any lambda Delta exceeds 1e9.
SimResult simulate_pattern(const SimConfig& cfg, Rng& rng, const PointFilter& filter = {});

/// Uniform point in the spatial cell (inside the region) and time slice of
/// `idx`.  A single weekday class draws the weekday uniformly.
EventRecord place_point(const SpaceTimeGrid& grid, const CellIndex& idx, Rng& rng, const PointFilter& filter = {});

/// Poisson draw, zero for a non-positive mean.
std::int64_t poisson_draw(double mean, Rng& rng);

/// Expected count of every stored draw (rows) in every space-time cell
/// (columns), summed over weekday classes.
Eigen::MatrixXd expected_count_matrix(const PosteriorChain& chain, const SpaceTimeGrid& grid);

/// N^(l)(B) ~ Poisson(sum_{j in B} lambda^(l)_j Delta_j) for every stored draw.
std::vector<std::int64_t> posterior_predictive_counts(const PosteriorChain& chain, const SpaceTimeGrid& grid,
                                                      std::span<const std::size_t> cells, Rng& rng);

}  // namespace stcox
