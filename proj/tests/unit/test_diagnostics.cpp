#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stcox/diagnostics.hpp"

using namespace stcox;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, 1.0);
  std::vector<double> x(n);
  double v = e(rng) / std::sqrt(1.0 - phi * phi);
  for (auto& xi : x) {
    xi = v;
    v = phi * v + e(rng);
  }
  return x;
}

PosteriorChain toy_chain(ModelVariant variant, int classes) {
  PosteriorChain c;
  c.variant = variant;
  c.weekday_classes = classes;
  c.landmarks = {LandmarkSpec{"a", {0.0, 0.0}, 1.0, 1.0, 0.0}};
  for (int i = 0; i < 200; ++i) {
    Draw d;
    d.iteration = static_cast<std::size_t>(i);
    d.beta = {0.01 * i};
    d.rho = {0.1};
    d.mu = std::vector<double>(static_cast<std::size_t>(classes), 1.0 + 0.001 * i);
    d.delta = std::vector<double>(static_cast<std::size_t>(classes), 0.5);
    d.cov = {2.0, 0.1 + 0.0001 * i, 1.0, 1.0, 1.0, 0.0};
    c.draws.push_back(d);
  }
  return c;
}

}  // namespace

TEST(Autocorrelation, LagZeroIsOne) {
  const auto x = ar1(0.5, 2000, 1);
  const auto r = autocorrelation(x, 5);
  ASSERT_EQ(r.size(), 6u);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_NEAR(r[1], 0.5, 0.07);
}

TEST(Inefficiency, IidNearOne) {
  const auto x = ar1(0.0, 5000, 2);
  const double f = inefficiency_factor(x);
  EXPECT_GE(f, 0.8);
  EXPECT_LE(f, 1.3);
}

TEST(Inefficiency, Ar1MatchesTheory) {
  // (1 + phi) / (1 - phi) = 3.
  const auto x = ar1(0.5, 100000, 3);
  EXPECT_NEAR(inefficiency_factor(x), 3.0, 0.6);
}

TEST(Inefficiency, AlternatingBelowOne) {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 ? 1.0 : -1.0) + 1e-3 * std::sin(0.37 * i);
  const double f = inefficiency_factor(x);
  EXPECT_LT(f, 1.0);
  EXPECT_GE(f, 0.0);
}

TEST(Inefficiency, DegenerateTraces) {
  EXPECT_TRUE(std::isnan(inefficiency_factor(std::vector<double>(100, 2.0))));
  EXPECT_TRUE(std::isnan(inefficiency_factor(std::vector<double>{1.0, 2.0, 3.0})));
}

TEST(Traces, NamesFollowVariant) {
  const auto lgcp = parameter_traces(toy_chain(ModelVariant::LgcpSeparable, 1));
  std::vector<std::string> names;
  for (const auto& t : lgcp) names.push_back(t.name);
  EXPECT_NE(std::find(names.begin(), names.end(), "sigma2_phi_s"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "beta1"), names.end());
  EXPECT_EQ(std::find(names.begin(), names.end(), "rho1"), names.end());
  EXPECT_EQ(std::find(names.begin(), names.end(), "gamma"), names.end());

  const auto nhpp = parameter_traces(toy_chain(ModelVariant::Nhpp, 7));
  names.clear();
  for (const auto& t : nhpp) names.push_back(t.name);
  EXPECT_NE(std::find(names.begin(), names.end(), "rho1"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "mu7"), names.end());
  EXPECT_EQ(std::find(names.begin(), names.end(), "sigma2"), names.end());
}

TEST(Summary, IntervalsAndCoverage) {
  const PosteriorChain c = toy_chain(ModelVariant::LgcpSeparable, 1);
  const auto rows = summarize(c, {{"beta1", 1.0}, {"sigma2_phi_s", 5.0}});
  bool saw_beta = false, saw_product = false;
  for (const auto& r : rows) {
    if (r.name == "beta1") {
      saw_beta = true;
      EXPECT_NEAR(r.mean, 0.995, 1e-12);
      EXPECT_LT(r.lower, r.upper);
      EXPECT_TRUE(r.covers_truth());
    }
    if (r.name == "sigma2_phi_s") {
      saw_product = true;
      EXPECT_NEAR(r.mean, 2.0 * (0.1 + 0.0001 * 99.5), 1e-12);
      EXPECT_FALSE(r.covers_truth());
    }
  }
  EXPECT_TRUE(saw_beta);
  EXPECT_TRUE(saw_product);
}

TEST(Summary, TruthMapMatchesTraceNames) {
  ModelState s;
  s.variant = ModelVariant::LgcpSeparable;
  s.beta = {1.5, -0.5};
  s.temporal = TemporalParams::uniform(1, 3.0, 0.4);
  s.cov = {2.0, 0.1, 0.5, 1.0, 1.0, 0.0};
  const auto t = truth_map(s);
  EXPECT_EQ(t.at("beta2"), -0.5);
  EXPECT_EQ(t.at("mu"), 3.0);
  EXPECT_DOUBLE_EQ(t.at("sigma2_phi_t"), 1.0);
}
