#pragma once

// Correlation families on the circle, spatial exponential correlation and
// the two space x circular-time covariance functions used by the LGCP.

#include <functional>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "stcox/geomtime.hpp"

namespace stcox {

struct CovarianceParams {
  static constexpr int kSpatialDimension = 2;

  double sigma2 = 1.0;        // marginal variance
  double phi_s = 0.1;         // spatial decay, 1/km
  double phi_t = 1.0;         // temporal decay, 1/radian
  double alpha = 1.0;         // smoothness in (0, 1]
  double cauchy_shape = 1.0;  // tau of the generalized Cauchy / delta exponent of the nonseparable kernel
  double gamma = 0.0;         // separability in [0, 1]

  // Throws ParameterError when any field leaves its domain.
  void validate() const;
};

void to_json(nlohmann::json& j, const CovarianceParams& p);
void from_json(const nlohmann::json& j, CovarianceParams& p);

enum class CovarianceModel { Separable, Nonseparable };

std::string to_string(CovarianceModel m);

/// exp(-(phi u)^alpha) for u in [0, pi].
double ccf_powered_exponential(double u, double phi_t, double alpha);

/// (1 + (phi u)^alpha)^(-tau/alpha) for u in [0, pi].
double ccf_generalized_cauchy(double u, double phi_t, double alpha, double shape);

/// exp(-phi h).
double scf_exponential(double h, double phi_s);

/// Decay giving correlation `target` at distance `h_max`.
double phi_for_correlation(double target, double h_max);

/// sigma2 * C_s(h) * C_gc(u) with tau = cauchy_shape.
double cov_separable(double h, double u, const CovarianceParams& p);

/// Gneiting-type nonseparable kernel on R^2 x S^1:
///   sigma2 / psi^(delta + gamma d/2) * exp(-phi_s h / psi^(gamma/2)),
///   psi = 1 + (phi_t u)^alpha, delta = cauchy_shape, d = 2.
/// gamma = 0 reduces to the separable kernel with tau = delta * alpha.
double cov_nonseparable(double h, double u, const CovarianceParams& p);

double covariance(CovarianceModel model, double h, double u, const CovarianceParams& p);

struct SpaceTimePoint {
  PlanarPoint location;
  double time = 0.0;  // radians
};

using SpaceTimeKernel = std::function<double(double h, double u)>;

struct DefinitenessCheck {
  double min_eigenvalue = 0.0;
  bool passed = false;
};

/// Builds the Gram matrix of `kernel` over `points` (at most 500) and reports
/// its smallest eigenvalue; passes when min_eig >= -tolerance * scale.
DefinitenessCheck check_positive_definite(const SpaceTimeKernel& kernel, std::span<const SpaceTimePoint> points,
                                          double tolerance, double scale = 1.0);

}  // namespace stcox
