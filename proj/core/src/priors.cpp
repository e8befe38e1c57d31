#include "stcox/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

namespace stcox {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_inverse_gamma_density(double x, double shape, double scale) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * d * d / variance;
}

double log_uniform_density(double x, double lower, double upper) {
  if (!(x >= lower && x <= upper)) return kNegInf;
  return -std::log(upper - lower);
}

double PriorSpec::log_mu(double x) const { return log_gamma_density(x, mu_shape, mu_rate); }
double PriorSpec::log_delta(double x) const { return log_gamma_density(x, delta_shape, delta_rate); }
double PriorSpec::log_beta(double x) const { return log_normal_density(x, 0.0, beta_variance); }
double PriorSpec::log_sigma2(double x) const { return log_inverse_gamma_density(x, sigma2_shape, sigma2_scale); }
double PriorSpec::log_phi_s(double x) const { return log_uniform_density(x, 0.0, phi_s_max); }
double PriorSpec::log_phi_t(double x) const { return log_uniform_density(x, 0.0, phi_t_max); }
double PriorSpec::log_gamma(double x) const {
  // U[0, gamma_max): the open upper end has measure zero.
  return x < gamma_max ? log_uniform_density(x, 0.0, gamma_max) : kNegInf;
}
double PriorSpec::log_rho(double x) const {
  return (x > rho_min && x < rho_max) ? -std::log(rho_max - rho_min) : kNegInf;
}

void to_json(nlohmann::json& j, const PriorSpec& p) {
  j = nlohmann::json{{"mu", {{"shape", p.mu_shape}, {"rate", p.mu_rate}}},
                     {"delta", {{"shape", p.delta_shape}, {"rate", p.delta_rate}}},
                     {"beta_variance", p.beta_variance},
                     {"sigma2", {{"shape", p.sigma2_shape}, {"scale", p.sigma2_scale}}},
                     {"phi_s_max", p.phi_s_max},
                     {"phi_t_max", p.phi_t_max},
                     {"gamma_max", p.gamma_max},
                     {"rho", {{"min", p.rho_min}, {"max", p.rho_max}}},
                     {"conventions", "gamma(shape, rate); inverse_gamma(shape, scale)"}};
}

void from_json(const nlohmann::json& j, PriorSpec& p) {
  if (j.contains("mu")) {
    p.mu_shape = j["mu"].value("shape", p.mu_shape);
    p.mu_rate = j["mu"].value("rate", p.mu_rate);
  }
  if (j.contains("delta")) {
    p.delta_shape = j["delta"].value("shape", p.delta_shape);
    p.delta_rate = j["delta"].value("rate", p.delta_rate);
  }
  p.beta_variance = j.value("beta_variance", p.beta_variance);
  if (j.contains("sigma2")) {
    p.sigma2_shape = j["sigma2"].value("shape", p.sigma2_shape);
    p.sigma2_scale = j["sigma2"].value("scale", p.sigma2_scale);
  }
  p.phi_s_max = j.value("phi_s_max", p.phi_s_max);
  p.phi_t_max = j.value("phi_t_max", p.phi_t_max);
  p.gamma_max = j.value("gamma_max", p.gamma_max);
  if (j.contains("rho")) {
    p.rho_min = j["rho"].value("min", p.rho_min);
    p.rho_max = j["rho"].value("max", p.rho_max);
  }
}

}  // namespace stcox
