#include "stcox/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"
#include "stcox/model.hpp"
#include "stcox/simulate.hpp"
#include "stcox/stats.hpp"

namespace stcox {

namespace {

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("retention probability must lie in (0, 1)");
}

}  // namespace

ThinningSplit p_thin(std::span<const int> counts, double p, Rng& rng) {
  check_probability(p);
  ThinningSplit s;
  s.p = p;
  s.train.resize(counts.size());
  s.test.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw InputError("negative count");
    s.train[i] = counts[i] == 0 ? 0 : std::binomial_distribution<int>(counts[i], p)(rng);
    s.test[i] = counts[i] - s.train[i];
  }
  return s;
}

EventSplit p_thin(std::span<const EventRecord> events, double p, Rng& rng) {
  check_probability(p);
  EventSplit s;
  std::bernoulli_distribution keep(p);
  for (const auto& e : events) (keep(rng) ? s.train : s.test).push_back(e);
  return s;
}

double test_scale(double p) {
  check_probability(p);
  return (1.0 - p) / p;
}

Eigen::MatrixXd rescale_test_intensity(const Eigen::MatrixXd& train_expected, double p) {
  return train_expected * test_scale(p);
}

std::string to_string(TimeRange r) {
  switch (r) {
    case TimeRange::Early:
      return "02-10";
    case TimeRange::Day:
      return "10-18";
    case TimeRange::Evening:
      return "18-02";
  }
  return "?";
}

TimeRange time_range_from_string(const std::string& name) {
  for (TimeRange r : kAllTimeRanges) {
    if (name == to_string(r)) return r;
  }
  throw InputError("unknown time range '" + name + "' (expected 02-10, 10-18 or 18-02)");
}

std::vector<std::size_t> time_cells_in(const SpaceTimeGrid& grid, TimeRange range) {
  const double width = kTwoPi / 3.0;
  const double lo = width * static_cast<int>(range);
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < grid.n_time(); ++t) {
    const double c = grid.time_cells()[t].centroid;
    if (c >= lo && c < lo + width) out.push_back(t);
  }
  return out;
}

std::vector<EvalSubset> draw_subsets(const SpaceTimeGrid& grid, double q, std::size_t count, TimeRange range,
                                     Rng& rng) {
  if (!(q > 0.0 && q <= 1.0)) throw InputError("relative subset size q must lie in (0, 1]");
  if (count == 0) throw InputError("subset count must be positive");
  const double total = grid.total_area();
  const double target = q * total;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& c : grid.spatial_cells()) smallest = std::min(smallest, c.area);
  if (target < smallest) throw InputError("q |D| is smaller than the smallest grid cell");
  const auto times = time_cells_in(grid, range);
  if (times.empty()) throw InputError("no time cell falls in range " + to_string(range));

  std::vector<std::size_t> order(grid.n_spatial());
  std::vector<EvalSubset> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::iota(order.begin(), order.end(), 0);
    EvalSubset b;
    b.q = q;
    b.range = range;
    double area = 0.0;
    // Partial Fisher-Yates: order[0..i) is a uniform draw without replacement.
    for (std::size_t i = 0; i < order.size() && area < target * (1.0 - 1e-12); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
      b.spatial.push_back(order[i]);
      area += grid.spatial_cells()[order[i]].area;
    }
    std::sort(b.spatial.begin(), b.spatial.end());
    for (std::size_t s : b.spatial) {
      for (std::size_t t : times) b.cells.push_back(grid.cell(s, t));
    }
    b.relative_area = area / total;
    out.push_back(std::move(b));
  }
  return out;
}

std::int64_t subset_count(const SpaceTimeGrid& grid, std::span<const int> counts, const EvalSubset& b) {
  const auto classes = static_cast<std::size_t>(grid.weekday_classes());
  if (counts.size() != grid.n_cells() * classes) throw InputError("count vector does not match the grid");
  std::int64_t n = 0;
  for (std::size_t c : b.cells) {
    for (std::size_t w = 0; w < classes; ++w) n += counts[c * classes + w];
  }
  return n;
}

std::vector<std::int64_t> predictive_draws(const Eigen::MatrixXd& expected, const EvalSubset& b, Rng& rng) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(expected.rows()));
  for (Eigen::Index l = 0; l < expected.rows(); ++l) {
    double m = 0.0;
    for (std::size_t c : b.cells) m += expected(l, static_cast<Eigen::Index>(c));
    out.push_back(poisson_draw(m, rng));
  }
  return out;
}

std::vector<double> predictive_residuals(std::int64_t observed, std::span<const std::int64_t> predictive) {
  std::vector<double> r;
  r.reserve(predictive.size());
  for (auto n : predictive) r.push_back(static_cast<double>(observed - n));
  return r;
}

std::vector<double> predictive_residuals(const Eigen::MatrixXd& test_expected, std::int64_t observed,
                                         const EvalSubset& b, Rng& rng) {
  return predictive_residuals(observed, predictive_draws(test_expected, b, rng));
}

bool interval_contains_zero(std::span<const double> residuals, double nominal) {
  return central_interval(residuals, nominal).contains(0.0);
}

double pic(const std::vector<std::vector<double>>& residuals, double nominal) {
  if (residuals.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hit = 0;
  for (const auto& r : residuals) hit += interval_contains_zero(r, nominal) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(residuals.size());
}

double rps(std::span<const std::int64_t> draws, std::int64_t observed) {
  const std::size_t n = draws.size();
  if (n < 2) throw InputError("RPS needs at least two predictive draws");
  std::vector<double> x(draws.begin(), draws.end());
  std::sort(x.begin(), x.end());
  double first = 0.0;
  double pairs = 0.0;
  const double len = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    first += std::abs(x[i] - static_cast<double>(observed));
    pairs += (2.0 * static_cast<double>(i) - len + 1.0) * x[i];
  }
  // sum_{l,l'} |x_l - x_l'| = 2 sum_i (2i - L + 1) x_(i)
  return first / len - pairs / (len * len);
}

std::vector<double> local_pic(const SpaceTimeGrid& grid, const std::vector<EvalSubset>& subsets,
                              const std::vector<bool>& covered) {
  if (subsets.size() != covered.size()) throw InputError("one coverage flag per subset required");
  std::vector<double> hits(grid.n_spatial(), 0.0);
  std::vector<double> seen(grid.n_spatial(), 0.0);
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    for (std::size_t s : subsets[k].spatial) {
      seen[s] += 1.0;
      hits[s] += covered[k] ? 1.0 : 0.0;
    }
  }
  std::vector<double> out(grid.n_spatial(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (seen[s] > 0.0) out[s] = hits[s] / seen[s];
  }
  return out;
}

double ValidationReport::overall_pic() const {
  double acc = 0.0;
  double n = 0.0;
  for (const auto& e : entries) {
    acc += e.pic * static_cast<double>(e.subsets);
    n += static_cast<double>(e.subsets);
  }
  return n > 0.0 ? acc / n : std::numeric_limits<double>::quiet_NaN();
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = nlohmann::json{{"variant", r.variant}, {"p", r.p}, {"nominal", r.nominal}, {"overall_pic", r.overall_pic()}};
  auto& entries = j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json local = nlohmann::json::array();
    for (double v : e.local_pic) local.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
    entries.push_back({{"q", e.q},
                       {"time_range", to_string(e.range)},
                       {"subsets", e.subsets},
                       {"mean_rps", e.mean_rps},
                       {"pic", e.pic},
                       {"local_pic", std::move(local)}});
  }
}

ValidationReport score_model(const PosteriorChain& chain, const SpaceTimeGrid& grid, std::span<const int> test,
                             const ScoringOptions& options, Rng& rng) {
  if (chain.draws.size() < 2) throw InputError("scoring needs at least two posterior draws");
  ValidationReport report;
  report.variant = to_string(chain.variant);
  report.p = options.p;
  report.nominal = options.nominal;
  const Eigen::MatrixXd expected = rescale_test_intensity(expected_count_matrix(chain, grid), options.p);
  Rng subset_rng = make_stream(options.subset_seed, 0);
  for (double q : options.q) {
    for (TimeRange range : options.ranges) {
      const auto subsets = draw_subsets(grid, q, options.subsets, range, subset_rng);
      ValidationEntry e;
      e.q = q;
      e.range = range;
      e.subsets = subsets.size();
      std::vector<bool> covered;
      std::vector<std::vector<double>> residuals;
      double rps_sum = 0.0;
      for (const auto& b : subsets) {
        const std::int64_t observed = subset_count(grid, test, b);
        const auto draws = predictive_draws(expected, b, rng);
        rps_sum += rps(draws, observed);
        residuals.push_back(predictive_residuals(observed, draws));
        covered.push_back(interval_contains_zero(residuals.back(), options.nominal));
      }
      e.mean_rps = rps_sum / static_cast<double>(subsets.size());
      e.pic = pic(residuals, options.nominal);
      e.local_pic = local_pic(grid, subsets, covered);
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace stcox
