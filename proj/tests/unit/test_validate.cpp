#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "stcox/errors.hpp"
#include "stcox/validate.hpp"

using namespace stcox;

TEST(Thinning, ConservesCounts) {
  Rng rng(1);
  std::vector<int> n(500);
  std::uniform_int_distribution<int> u(0, 40);
  for (auto& v : n) v = u(rng);
  for (double p : {0.1, 0.5, 0.9}) {
    const ThinningSplit s = p_thin(n, p, rng);
    for (std::size_t i = 0; i < n.size(); ++i) {
      EXPECT_EQ(s.train[i] + s.test[i], n[i]);
      EXPECT_GE(s.test[i], 0);
    }
  }
  const ThinningSplit all = p_thin(n, 1.0 - 1e-12, rng);
  EXPECT_EQ(all.train, n);
  EXPECT_THROW(p_thin(n, 0.0, rng), InputError);
  EXPECT_THROW(p_thin(n, 1.0, rng), InputError);
}

TEST(Thinning, BinomialSplit) {
  Rng rng(2);
  const std::vector<int> n{10000};
  const ThinningSplit s = p_thin(n, 0.5, rng);
  EXPECT_NEAR(s.train[0], 5000, 200);
}

TEST(Thinning, EventSplitIsIndependent) {
  Rng rng(3);
  std::vector<EventRecord> ev(4000);
  const EventSplit s = p_thin(ev, 0.25, rng);
  EXPECT_EQ(s.train.size() + s.test.size(), ev.size());
  EXPECT_NEAR(static_cast<double>(s.train.size()), 1000.0, 4.0 * std::sqrt(4000 * 0.25 * 0.75));
}

TEST(Thinning, RescaleFactor) {
  EXPECT_DOUBLE_EQ(test_scale(0.5), 1.0);
  EXPECT_DOUBLE_EQ(test_scale(0.25), 3.0);
  const Eigen::MatrixXd e = Eigen::MatrixXd::Constant(2, 3, 2.0);
  EXPECT_DOUBLE_EQ(rescale_test_intensity(e, 0.5)(1, 2), 2.0);
  EXPECT_DOUBLE_EQ(rescale_test_intensity(e, 0.2)(0, 0), 8.0);
}

TEST(TimeRanges, PartitionTheDay) {
  const SpaceTimeGrid g({0.0, 1.0, 0.0, 1.0, {}}, 1, 1, 24, 1);
  std::set<std::size_t> seen;
  for (TimeRange r : kAllTimeRanges) {
    const auto cells = time_cells_in(g, r);
    EXPECT_EQ(cells.size(), 8u);
    seen.insert(cells.begin(), cells.end());
    EXPECT_EQ(time_range_from_string(to_string(r)), r);
  }
  EXPECT_EQ(seen.size(), 24u);
  EXPECT_EQ(to_string(TimeRange::Evening), "18-02");
  EXPECT_EQ(time_cells_in(g, TimeRange::Early).front(), 0u);
  EXPECT_THROW(time_range_from_string("noon"), InputError);
}

TEST(Subsets, AreaNearTarget) {
  const SpaceTimeGrid g({0.0, 20.0, 0.0, 20.0, {}}, 20, 20, 12, 1);
  Rng rng(4);
  const auto subsets = draw_subsets(g, 0.05, 1000, TimeRange::Day, rng);
  ASSERT_EQ(subsets.size(), 1000u);
  std::set<std::size_t> union_cells;
  std::size_t total = 0;
  for (const auto& b : subsets) {
    EXPECT_GE(b.relative_area, 0.045);
    EXPECT_LE(b.relative_area, 0.06);
    EXPECT_EQ(b.cells.size(), b.spatial.size() * 4);
    EXPECT_EQ(std::set<std::size_t>(b.spatial.begin(), b.spatial.end()).size(), b.spatial.size());
    union_cells.insert(b.spatial.begin(), b.spatial.end());
    total += b.spatial.size();
  }
  // Subsets overlap.
  EXPECT_LT(union_cells.size(), total);
  EXPECT_THROW(draw_subsets(g, 0.0, 1, TimeRange::Day, rng), InputError);
  EXPECT_THROW(draw_subsets(g, 1e-4, 1, TimeRange::Day, rng), InputError);
}

TEST(Residuals, Examples) {
  const std::vector<std::int64_t> n{3, 5, 7};
  EXPECT_EQ(predictive_residuals(5, n), (std::vector<double>{2.0, 0.0, -2.0}));
  EXPECT_TRUE(interval_contains_zero(std::vector<double>{2.0, 0.0, -2.0}, 0.9));
  EXPECT_FALSE(interval_contains_zero(std::vector<double>{1.0, 2.0, 3.0}, 0.9));
}

TEST(Pic, ExamplesAndMonotone) {
  std::vector<std::vector<double>> r;
  r.push_back({-1.0, 0.5, 1.0});
  r.push_back({1.0, 2.0, 3.0});
  r.push_back({-3.0, -1.0, 0.5});
  EXPECT_DOUBLE_EQ(pic(r, 0.9), 2.0 / 3.0);

  Rng rng(5);
  std::normal_distribution<double> n(0.5, 1.0);
  std::vector<std::vector<double>> many(300, std::vector<double>(200));
  for (auto& v : many) {
    const double shift = n(rng);
    for (auto& x : v) x = n(rng) + shift;
  }
  double last = 0.0;
  for (double level : {0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const double p = pic(many, level);
    EXPECT_GE(p, last);
    last = p;
  }
}

TEST(Rps, Examples) {
  EXPECT_DOUBLE_EQ(rps(std::vector<std::int64_t>{4, 4}, 4), 0.0);
  EXPECT_DOUBLE_EQ(rps(std::vector<std::int64_t>{6, 6, 6}, 4), 2.0);
  EXPECT_THROW(rps(std::vector<std::int64_t>{4}, 4), InputError);
  EXPECT_DOUBLE_EQ(rps(std::vector<std::int64_t>{0, 2}, 1), 0.5);
  EXPECT_DOUBLE_EQ(rps(std::vector<std::int64_t>{3, 3, 3}, 0), 3.0);
}

TEST(Rps, PermutationInvariant) {
  Rng rng(6);
  std::poisson_distribution<std::int64_t> p(6.0);
  std::vector<std::int64_t> d(501);
  for (auto& v : d) v = p(rng);
  const double a = rps(d, 4);
  std::shuffle(d.begin(), d.end(), rng);
  EXPECT_NEAR(rps(d, 4), a, 1e-12);
}

TEST(Rps, MatchesClosedFormPoisson) {
  Rng rng(7);
  for (double lambda : {0.5, 2.0, 10.0}) {
    std::poisson_distribution<std::int64_t> p(lambda);
    std::vector<std::int64_t> d(40000);
    for (auto& v : d) v = p(rng);
    for (long y : {0L, 2L, 15L}) {
      const double oracle = stcox::testing::poisson_crps(lambda, y);
      EXPECT_NEAR(rps(d, y), oracle, 0.02 * oracle + 0.01) << lambda << " " << y;
    }
  }
}

TEST(Rps, ProperScore) {
  Rng rng(8);
  std::poisson_distribution<std::int64_t> truth(4.0);
  auto sample = [&](double lambda) {
    std::poisson_distribution<std::int64_t> p(lambda);
    std::vector<std::int64_t> d(4000);
    for (auto& v : d) v = p(rng);
    return d;
  };
  const auto exact = sample(4.0), low = sample(2.5), high = sample(6.0);
  double s_exact = 0.0, s_low = 0.0, s_high = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const auto y = truth(rng);
    s_exact += rps(exact, y);
    s_low += rps(low, y);
    s_high += rps(high, y);
  }
  EXPECT_LT(s_exact, s_low);
  EXPECT_LT(s_exact, s_high);
}

TEST(LocalPic, AveragesCoveringSubsets) {
  const SpaceTimeGrid g({0.0, 3.0, 0.0, 1.0, {}}, 3, 1, 2, 1);
  std::vector<EvalSubset> b(3);
  b[0].spatial = {0};
  b[1].spatial = {0, 1};
  b[2].spatial = {1};
  const auto local = local_pic(g, b, {true, false, true});
  ASSERT_EQ(local.size(), 3u);
  EXPECT_DOUBLE_EQ(local[0], 0.5);
  EXPECT_DOUBLE_EQ(local[1], 0.5);
  EXPECT_TRUE(std::isnan(local[2]));
}

TEST(Score, ReportShape) {
  const SpaceTimeGrid g({0.0, 10.0, 0.0, 10.0, {}}, 10, 10, 6, 1);
  PosteriorChain chain;
  chain.variant = ModelVariant::Nhpp;
  chain.weekday_classes = 1;
  for (int i = 0; i < 200; ++i) {
    Draw d;
    d.mu = {1.0};
    d.delta = {0.0};
    d.log_base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.n_cells()));
    chain.draws.push_back(d);
  }
  Rng rng(9);
  std::vector<int> test(g.n_cells(), 1);
  ScoringOptions opt;
  opt.subsets = 50;
  opt.q = {0.05, 0.1};
  const ValidationReport r = score_model(chain, g, test, opt, rng);
  ASSERT_EQ(r.entries.size(), 6u);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.subsets, 50u);
    EXPECT_GE(e.pic, 0.0);
    EXPECT_LE(e.pic, 1.0);
    EXPECT_GT(e.mean_rps, 0.0);
    EXPECT_EQ(e.local_pic.size(), g.n_spatial());
  }
  EXPECT_GE(r.overall_pic(), 0.0);
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("entries").size(), 6u);
}
