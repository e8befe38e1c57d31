#include "stcox/covariance.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"

namespace stcox {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in (0, 1]; larger values are not positive definite on the circle");
  }
}

void check_lag(double u) {
  if (!(u >= 0.0 && u <= std::numbers::pi + 1e-12)) throw ParameterError("circular lag must lie in [0, pi]");
}

}  // namespace

void CovarianceParams::validate() const {
  if (!(sigma2 > 0.0)) throw ParameterError("sigma2 must be positive");
  if (!(phi_s > 0.0)) throw ParameterError("phi_s must be positive");
  if (!(phi_t > 0.0)) throw ParameterError("phi_t must be positive");
  check_alpha(alpha);
  if (!(cauchy_shape > 0.0)) throw ParameterError("cauchy_shape must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
}

void to_json(nlohmann::json& j, const CovarianceParams& p) {
  j = nlohmann::json{{"sigma2", p.sigma2}, {"phi_s", p.phi_s},           {"phi_t", p.phi_t},
                     {"alpha", p.alpha},   {"cauchy_shape", p.cauchy_shape}, {"gamma", p.gamma}};
}

void from_json(const nlohmann::json& j, CovarianceParams& p) {
  p.sigma2 = j.value("sigma2", p.sigma2);
  p.phi_s = j.value("phi_s", p.phi_s);
  p.phi_t = j.value("phi_t", p.phi_t);
  p.alpha = j.value("alpha", p.alpha);
  p.cauchy_shape = j.value("cauchy_shape", p.cauchy_shape);
  p.gamma = j.value("gamma", p.gamma);
}

std::string to_string(CovarianceModel m) {
  return m == CovarianceModel::Separable ? "separable" : "nonseparable";
}

double ccf_powered_exponential(double u, double phi_t, double alpha) {
  check_alpha(alpha);
  check_lag(u);
  return std::exp(-std::pow(phi_t * u, alpha));
}

double ccf_generalized_cauchy(double u, double phi_t, double alpha, double shape) {
  check_alpha(alpha);
  check_lag(u);
  if (!(shape > 0.0)) throw ParameterError("generalized Cauchy shape must be positive");
  return std::pow(1.0 + std::pow(phi_t * u, alpha), -shape / alpha);
}

double scf_exponential(double h, double phi_s) {
  if (!(h >= 0.0)) throw ParameterError("spatial lag must be nonnegative");
  return std::exp(-phi_s * h);
}

double phi_for_correlation(double target, double h_max) {
  if (!(target > 0.0 && target < 1.0) || !(h_max > 0.0)) throw ParameterError("invalid correlation target");
  return -std::log(target) / h_max;
}

double cov_separable(double h, double u, const CovarianceParams& p) {
  return p.sigma2 * scf_exponential(h, p.phi_s) * ccf_generalized_cauchy(u, p.phi_t, p.alpha, p.cauchy_shape);
}

double cov_nonseparable(double h, double u, const CovarianceParams& p) {
  check_alpha(p.alpha);
  check_lag(u);
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  if (!(h >= 0.0)) throw ParameterError("spatial lag must be nonnegative");
  const double psi = 1.0 + std::pow(p.phi_t * u, p.alpha);
  const double half_d = 0.5 * CovarianceParams::kSpatialDimension;
  return p.sigma2 * std::pow(psi, -(p.cauchy_shape + p.gamma * half_d)) *
         std::exp(-p.phi_s * h / std::pow(psi, 0.5 * p.gamma));
}

double covariance(CovarianceModel model, double h, double u, const CovarianceParams& p) {
  return model == CovarianceModel::Separable ? cov_separable(h, u, p) : cov_nonseparable(h, u, p);
}

DefinitenessCheck check_positive_definite(const SpaceTimeKernel& kernel, std::span<const SpaceTimePoint> points,
                                          double tolerance, double scale) {
  if (points.size() > 500) throw InputError("positive definiteness check limited to 500 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& a = points[static_cast<std::size_t>(i)];
      const auto& b = points[static_cast<std::size_t>(j)];
      const double h = std::hypot(a.location.easting - b.location.easting, a.location.northing - b.location.northing);
      gram(i, j) = gram(j, i) = kernel(h, circular_distance(a.time, b.time));
    }
  }
  if (n == 0) return {0.0, true};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  return {min_eig, min_eig >= -tolerance * scale};
}

}  // namespace stcox
