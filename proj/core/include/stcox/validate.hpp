#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "stcox/geomtime.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/random.hpp"

namespace stcox {

struct ThinningSplit {
  double p = 0.5;
  std::vector<int> train;  // same layout as SpaceTimeGrid::counts()
  std::vector<int> test;
};

/// train ~ Binomial(n, p) per entry, test = n - train.
ThinningSplit p_thin(std::span<const int> counts, double p, Rng& rng);

struct EventSplit {
  std::vector<EventRecord> train;
  std::vector<EventRecord> test;
};

/// Each event independently kept in train with probability p.
EventSplit p_thin(std::span<const EventRecord> events, double p, Rng& rng);

/// (1 - p) / p.
double test_scale(double p);
Eigen::MatrixXd rescale_test_intensity(const Eigen::MatrixXd& train_expected, double p);

enum class TimeRange { Early, Day, Evening };  // 02-10, 10-18, 18-02

std::string to_string(TimeRange r);
TimeRange time_range_from_string(const std::string& name);
inline constexpr TimeRange kAllTimeRanges[] = {TimeRange::Early, TimeRange::Day, TimeRange::Evening};

/// Time cells whose centroid falls in the range.
std::vector<std::size_t> time_cells_in(const SpaceTimeGrid& grid, TimeRange range);

struct EvalSubset {
  std::vector<std::size_t> spatial;  // spatial cell indices
  std::vector<std::size_t> cells;    // space-time cell indices
  double relative_area = 0.0;
  double q = 0.0;
  TimeRange range = TimeRange::Early;
};

/// Spatial cells drawn without replacement until the area first reaches
/// q |D|, crossed with every time cell of `range`.  Subsets may overlap.
std::vector<EvalSubset> draw_subsets(const SpaceTimeGrid& grid, double q, std::size_t count, TimeRange range,
                                     Rng& rng);

/// Observed count of `counts` over the subset, all weekday classes.
std::int64_t subset_count(const SpaceTimeGrid& grid, std::span<const int> counts, const EvalSubset& b);

/// One Poisson predictive draw per row of `expected` (draws x cells).
std::vector<std::int64_t> predictive_draws(const Eigen::MatrixXd& expected, const EvalSubset& b, Rng& rng);

/// observed - N^(l) for every draw.
std::vector<double> predictive_residuals(std::int64_t observed, std::span<const std::int64_t> predictive);
std::vector<double> predictive_residuals(const Eigen::MatrixXd& test_expected, std::int64_t observed,
                                         const EvalSubset& b, Rng& rng);

/// Whether the central `nominal` interval of the residuals contains 0.
bool interval_contains_zero(std::span<const double> residuals, double nominal);

/// Fraction of subsets whose central interval contains zero.
double pic(const std::vector<std::vector<double>>& residuals, double nominal = 0.9);

/// (1/L) sum |N_l - y| - (1/2L^2) sum_{l,l'} |N_l - N_l'|.
double rps(std::span<const std::int64_t> draws, std::int64_t observed);

/// Per spatial cell: fraction of covering subsets whose interval contains 0;
/// NaN where no subset covers the cell.
std::vector<double> local_pic(const SpaceTimeGrid& grid, const std::vector<EvalSubset>& subsets,
                              const std::vector<bool>& covered);

struct ValidationEntry {
  double q = 0.0;
  TimeRange range = TimeRange::Early;
  std::size_t subsets = 0;
  double mean_rps = 0.0;
  double pic = 0.0;
  std::vector<double> local_pic;
};

struct ValidationReport {
  std::string variant;
  double p = 0.5;
  double nominal = 0.9;
  std::vector<ValidationEntry> entries;

  double overall_pic() const;
};

void to_json(nlohmann::json& j, const ValidationReport& r);

struct ScoringOptions {
  double p = 0.5;
  std::vector<double> q{0.02, 0.04, 0.06, 0.08, 0.1};
  std::size_t subsets = 1000;
  double nominal = 0.9;
  std::vector<TimeRange> ranges{kAllTimeRanges[0], kAllTimeRanges[1], kAllTimeRanges[2]};
  // Subsets come from their own stream so every model sees the same B_k.
  std::uint64_t subset_seed = 0;
};

/// Scores a chain fitted on the train counts of `grid` against `test` counts.
/// `rng` drives only the predictive draws.
ValidationReport score_model(const PosteriorChain& chain, const SpaceTimeGrid& grid, std::span<const int> test,
                             const ScoringOptions& options, Rng& rng);

}  // namespace stcox
