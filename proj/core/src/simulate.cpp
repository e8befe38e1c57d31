#include "stcox/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "stcox/errors.hpp"
#include "stcox/gp.hpp"

namespace stcox {

std::int64_t poisson_draw(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

EventRecord place_point(const SpaceTimeGrid& grid, const CellIndex& idx, Rng& rng, const PointFilter& filter) {
  const auto& sc = grid.spatial_cells().at(idx.spatial);
  const auto& tc = grid.time_cells().at(idx.time);
  const auto& region = grid.region();
  const double x0 = region.x_min + sc.ix * grid.cell_width();
  const double y0 = region.y_min + sc.iy * grid.cell_height();
  std::uniform_real_distribution<double> ux(x0, x0 + grid.cell_width());
  std::uniform_real_distribution<double> uy(y0, y0 + grid.cell_height());
  std::uniform_real_distribution<double> ut(tc.centroid - 0.5 * tc.width, tc.centroid + 0.5 * tc.width);
  std::uniform_int_distribution<int> uday(0, kDaysPerWeek - 1);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    EventRecord e;
    e.easting = ux(rng);
    e.northing = uy(rng);
    e.clock_angle = ut(rng);
    e.weekday = static_cast<Weekday>(grid.weekday_classes() == 1 ? uday(rng) : idx.weekday_class);
    const auto located = grid.locate(e);
    if (!located || located->spatial != idx.spatial || located->time != idx.time) continue;
    if (filter && !filter(e, idx)) continue;
    return e;
  }
  throw NumericalError("could not place a point in spatial cell " + std::to_string(idx.spatial));
}

SimResult simulate_pattern(const SimConfig& cfg, Rng& rng, const PointFilter& filter) {
  const auto& truth = cfg.truth;
  const auto& grid = cfg.grid;
  truth.temporal.validate();
  if (truth.temporal.classes() != static_cast<std::size_t>(grid.weekday_classes())) {
    throw ParameterError("truth has " + std::to_string(truth.temporal.classes()) + " weekday classes, grid has " +
                         std::to_string(grid.weekday_classes()));
  }
  SimResult out;
  const Eigen::VectorXd log_l0 = log_lambda0_surface(grid, truth.landmarks, truth.beta);
  const auto n_time = static_cast<Eigen::Index>(grid.n_time());
  Eigen::VectorXd log_base(static_cast<Eigen::Index>(grid.n_cells()));
  for (Eigen::Index s = 0; s < log_l0.size(); ++s) log_base.segment(s * n_time, n_time).setConstant(log_l0[s]);
  if (is_lgcp(truth.variant)) {
    truth.cov.validate();
    if (truth.field) {
      out.z = truth.field->z;
    } else {
      const CovFactor factor = assemble_factor(grid, truth.cov, covariance_model(truth.variant));
      out.z = sample_prior_field(factor, rng).z;
    }
    if (out.z.size() != log_base.size()) throw ParameterError("field length does not match the grid");
    log_base += out.z - Eigen::VectorXd::Constant(log_base.size(), 0.5 * truth.cov.sigma2);
  }

  const int classes = grid.weekday_classes();
  std::vector<int> counts(grid.n_cells() * static_cast<std::size_t>(classes), 0);
  for (std::size_t j = 0; j < grid.n_cells(); ++j) {
    const double t = grid.time_cells()[grid.time_of(j)].centroid;
    for (int w = 0; w < classes; ++w) {
      const double m = std::exp(log_base[static_cast<Eigen::Index>(j)]) * kappa(t, w, truth.temporal) * grid.volume(j);
      if (m > kMaxCellMean || std::isnan(m)) {
        throw NumericalError("expected count " + std::to_string(m) + " in cell " + std::to_string(j) +
                             " exceeds the overflow guard");
      }
      counts[j * static_cast<std::size_t>(classes) + static_cast<std::size_t>(w)] =
          static_cast<int>(poisson_draw(m, rng));
    }
  }
  out.grid = grid.with_counts(counts);

  if (cfg.emit_exact_points) {
    std::vector<EventRecord> points;
    points.reserve(static_cast<std::size_t>(out.grid.total_count()));
    for (std::size_t j = 0; j < grid.n_cells(); ++j) {
      const CellIndex base{grid.spatial_of(j), grid.time_of(j), 0};
      for (int w = 0; w < classes; ++w) {
        CellIndex idx = base;
        idx.weekday_class = w;
        for (int k = 0; k < out.grid.count(j, w); ++k) points.push_back(place_point(grid, idx, rng, filter));
      }
    }
    out.points = std::move(points);
  }
  return out;
}

Eigen::MatrixXd expected_count_matrix(const PosteriorChain& chain, const SpaceTimeGrid& grid) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(chain.draws.size()), static_cast<Eigen::Index>(grid.n_cells()));
  for (std::size_t l = 0; l < chain.draws.size(); ++l) {
    out.row(static_cast<Eigen::Index>(l)) = expected_counts(chain.draws[l], grid).transpose();
  }
  return out;
}

std::vector<std::int64_t> posterior_predictive_counts(const PosteriorChain& chain, const SpaceTimeGrid& grid,
                                                      std::span<const std::size_t> cells, Rng& rng) {
  std::vector<std::int64_t> out;
  out.reserve(chain.draws.size());
  for (const auto& d : chain.draws) {
    const Eigen::VectorXd lambda = expected_counts(d, grid);
    double total = 0.0;
    for (std::size_t c : cells) total += lambda[static_cast<Eigen::Index>(c)];
    out.push_back(poisson_draw(total, rng));
  }
  return out;
}

}  // namespace stcox
