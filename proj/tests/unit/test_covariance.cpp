#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "stcox/covariance.hpp"
#include "stcox/errors.hpp"

using namespace stcox;

namespace {

constexpr double kPi = std::numbers::pi;

CovarianceParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CovarianceParams p;
  p.sigma2 = 0.2 + 3.0 * u(rng);
  p.phi_s = 0.005 + 0.3 * u(rng);
  p.phi_t = 0.05 + 5.0 * u(rng);
  p.alpha = 0.05 + 0.95 * u(rng);
  p.cauchy_shape = 0.2 + 2.0 * u(rng);
  p.gamma = u(rng);
  return p;
}

}  // namespace

TEST(PoweredExponential, ClosedForms) {
  EXPECT_DOUBLE_EQ(ccf_powered_exponential(0.0, 2.0, 0.7), 1.0);
  EXPECT_NEAR(ccf_powered_exponential(1.0, 1.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ccf_powered_exponential(1.0, 1.0, 1.0), 0.3679, 1e-4);
  EXPECT_THROW(ccf_powered_exponential(1.0, 1.0, 1.2), ParameterError);
}

TEST(GeneralizedCauchy, ClosedForms) {
  EXPECT_DOUBLE_EQ(ccf_generalized_cauchy(0.0, 3.0, 0.5, 2.0), 1.0);
  EXPECT_NEAR(ccf_generalized_cauchy(1.0, 1.0, 1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(ccf_generalized_cauchy(2.0, 0.5, 0.5, 2.0), 0.0625, 1e-15);
  EXPECT_THROW(ccf_generalized_cauchy(1.0, 1.0, 1.2, 1.0), ParameterError);
}

TEST(SpatialExponential, ClosedForms) {
  EXPECT_DOUBLE_EQ(scf_exponential(0.0, 0.3), 1.0);
  EXPECT_NEAR(scf_exponential(50.0, 0.02), std::exp(-1.0), 1e-15);
  const double h_max = 10.0;
  const double phi = phi_for_correlation(0.05, h_max);
  EXPECT_NEAR(phi, -std::log(0.05) / h_max, 1e-15);
  EXPECT_NEAR(scf_exponential(h_max, phi), 0.05, 1e-14);
}

TEST(Separable, Examples) {
  CovarianceParams p;
  p.sigma2 = 3.0;
  p.phi_s = 0.02;
  p.phi_t = 0.1;
  EXPECT_DOUBLE_EQ(cov_separable(0.0, 0.0, p), 3.0);
  // tau = alpha = 1
  EXPECT_NEAR(cov_separable(10.0, 1.0, p), 3.0 * std::exp(-0.2) / 1.1, 1e-14);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uh(0.0, 20.0), uu(0.0, kPi);
  for (int i = 0; i < 100; ++i) {
    const double h = uh(rng), u = uu(rng);
    EXPECT_NEAR(cov_separable(h, u, p),
                p.sigma2 * scf_exponential(h, p.phi_s) * ccf_generalized_cauchy(u, p.phi_t, p.alpha, p.cauchy_shape),
                1e-15);
  }
}

TEST(Nonseparable, Examples) {
  CovarianceParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(cov_nonseparable(0.0, 0.0, p), 1.0);
  // psi = 2, exponent delta + gamma = 2.
  EXPECT_NEAR(cov_nonseparable(1.0, 1.0, p), 0.25 * std::exp(-1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(cov_nonseparable(1.0, 1.0, p), 0.12327, 1e-5);
}

TEST(Nonseparable, GammaZeroMatchesSeparable) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uh(0.0, 100.0), uu(0.0, kPi);
  for (int d = 0; d < 200; ++d) {
    CovarianceParams ns = random_params(rng);
    ns.gamma = 0.0;
    CovarianceParams sep = ns;
    sep.cauchy_shape = ns.cauchy_shape * ns.alpha;
    for (int i = 0; i < 20; ++i) {
      const double h = uh(rng), u = uu(rng);
      const double a = cov_nonseparable(h, u, ns), b = cov_separable(h, u, sep);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(b));
    }
  }
}

TEST(Kernels, BoundedAndMonotone) {
  std::mt19937_64 rng(13);
  for (int d = 0; d < 50; ++d) {
    const CovarianceParams p = random_params(rng);
    for (auto model : {CovarianceModel::Separable, CovarianceModel::Nonseparable}) {
      EXPECT_NEAR(covariance(model, 0.0, 0.0, p), p.sigma2, 1e-14 * p.sigma2);
      for (int i = 0; i <= 20; ++i) {
        const double u = kPi * i / 20.0;
        for (int k = 0; k <= 20; ++k) {
          const double h = 5.0 * k;
          const double c = covariance(model, h, u, p);
          EXPECT_LE(std::abs(c), p.sigma2 * (1.0 + 1e-14));
          if (k > 0) EXPECT_LE(c, covariance(model, h - 5.0, u, p) * (1.0 + 1e-14));
          const bool monotone_in_u = model == CovarianceModel::Separable || k == 0;
          if (i > 0 && monotone_in_u) EXPECT_LE(c, covariance(model, h, kPi * (i - 1) / 20.0, p) * (1.0 + 1e-14));
        }
      }
    }
  }
}

TEST(Nonseparable, SpatialRangeGrowsWithTimeLag) {
  // Away from h = 0 the nonseparable kernel can increase in u.
  CovarianceParams p{1.0, 0.5, 1.0, 1.0, 0.5, 1.0};
  EXPECT_GT(cov_nonseparable(20.0, kPi, p), cov_nonseparable(20.0, 0.0, p));
  p.gamma = 0.0;
  EXPECT_LT(cov_nonseparable(20.0, kPi, p), cov_nonseparable(20.0, 0.0, p));
}

TEST(Kernels, RotationInvariantInTime) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(0.0, kTwoPi);
  const CovarianceParams p = random_params(rng);
  for (int i = 0; i < 200; ++i) {
    const double t1 = ut(rng), t2 = ut(rng), shift = ut(rng);
    const double a = cov_nonseparable(3.0, circular_distance(t1, t2), p);
    const double b = cov_nonseparable(3.0, circular_distance(std::fmod(t1 + shift, kTwoPi), std::fmod(t2 + shift, kTwoPi)), p);
    EXPECT_NEAR(a, b, 1e-12);
  }
}

TEST(Params, Validation) {
  CovarianceParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha = 1.5;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.gamma = 1.2;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.sigma2 = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Params, JsonRoundTrip) {
  CovarianceParams p{2.0, 0.05, 0.3, 0.8, 1.5, 0.4};
  const auto back = nlohmann::json(p).get<CovarianceParams>();
  EXPECT_EQ(back.sigma2, p.sigma2);
  EXPECT_EQ(back.phi_s, p.phi_s);
  EXPECT_EQ(back.phi_t, p.phi_t);
  EXPECT_EQ(back.alpha, p.alpha);
  EXPECT_EQ(back.cauchy_shape, p.cauchy_shape);
  EXPECT_EQ(back.gamma, p.gamma);
}

TEST(Definiteness, PoweredExponentialOnCircle) {
  std::vector<SpaceTimePoint> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({{0.0, 0.0}, kTwoPi * i / 50.0});
  const auto check = check_positive_definite([](double, double u) { return ccf_powered_exponential(u, 1.0, 1.0); },
                                             pts, 1e-8);
  EXPECT_TRUE(check.passed) << check.min_eigenvalue;
}

TEST(Definiteness, RandomKernels) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ux(0.0, 100.0), ut(0.0, kTwoPi);
  for (int d = 0; d < 10; ++d) {
    const CovarianceParams p = random_params(rng);
    std::vector<SpaceTimePoint> pts(100);
    for (auto& q : pts) q = {{ux(rng), ux(rng)}, ut(rng)};
    for (auto model : {CovarianceModel::Separable, CovarianceModel::Nonseparable}) {
      const auto check = check_positive_definite([&](double h, double u) { return covariance(model, h, u, p); }, pts,
                                                 1e-8, p.sigma2);
      EXPECT_TRUE(check.passed) << check.min_eigenvalue;
    }
  }
}

TEST(Definiteness, DetectsIndefiniteKernel) {
  std::vector<SpaceTimePoint> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({{0.1 * i, 0.0}, 0.0});
  const auto check = check_positive_definite([](double h, double) { return h < 0.15 ? 1.0 : -0.5; }, pts, 1e-8);
  EXPECT_FALSE(check.passed);
  std::vector<SpaceTimePoint> many(501);
  EXPECT_THROW(check_positive_definite([](double, double) { return 1.0; }, many, 1e-8), InputError);
}
