#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace stcox {

// Gamma is shape/rate; inverse gamma is shape/scale.
struct PriorSpec {
  double mu_shape = 2.0;
  double mu_rate = 0.05;
  double delta_shape = 2.0;
  double delta_rate = 0.05;
  double beta_variance = 100.0;
  double sigma2_shape = 2.0;
  double sigma2_scale = 0.05;
  double phi_s_max = 0.3;
  double phi_t_max = 6.0;
  double gamma_max = 1.0;
  double rho_min = -1.0;
  double rho_max = 1.0;

  double log_mu(double x) const;
  double log_delta(double x) const;
  double log_beta(double x) const;
  double log_sigma2(double x) const;
  double log_phi_s(double x) const;
  double log_phi_t(double x) const;
  double log_gamma(double x) const;
  double log_rho(double x) const;
};

void to_json(nlohmann::json& j, const PriorSpec& p);
void from_json(const nlohmann::json& j, PriorSpec& p);

// Normalized log densities; -inf outside the support.
double log_gamma_density(double x, double shape, double rate);
double log_inverse_gamma_density(double x, double shape, double scale);
double log_normal_density(double x, double mean, double variance);
double log_uniform_density(double x, double lower, double upper);

}  // namespace stcox
