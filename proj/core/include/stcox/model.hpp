#pragma once

// Intensity model on the grid:
//   lambda(s, t, w) = lambda0(s) kappa(t, w) exp(-sigma2/2 + Z(s, t))
//   log lambda0(s)  = sum_k beta_k g_k(s)
//   kappa(t, w)     = mu_w (1 + delta_w 1{t in [4pi/3, 2pi)})
// The NHPP variant drops the -sigma2/2 + Z term.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "stcox/covariance.hpp"
#include "stcox/geomtime.hpp"
#include "stcox/gp.hpp"

namespace stcox {

struct LandmarkSpec {
  std::string name;
  PlanarPoint location;
  double sigma1 = 1.0;  // easting scale, km
  double sigma2 = 1.0;  // northing scale, km
  double rho = 0.0;     // kernel correlation in (-1, 1)

  void validate() const;
};

/// Landmark whose kernel scales are the grid's centroid spacings.
LandmarkSpec make_landmark(std::string name, PlanarPoint location, const SpaceTimeGrid& grid, double rho = 0.0);

void to_json(nlohmann::json& j, const LandmarkSpec& l);
void from_json(const nlohmann::json& j, LandmarkSpec& l);

struct TemporalParams {
  static constexpr double kEveningStart = 4.0 * std::numbers::pi / 3.0;  // 18:00

  std::vector<double> mu;     // one per weekday class, > 0
  std::vector<double> delta;  // one per weekday class, >= 0

  static TemporalParams uniform(int classes, double mu, double delta);
  static bool in_evening(double t) { return t >= kEveningStart && t < kTwoPi; }
  std::size_t classes() const { return mu.size(); }
  void validate() const;
};

void to_json(nlohmann::json& j, const TemporalParams& t);
void from_json(const nlohmann::json& j, TemporalParams& t);

enum class ModelVariant { Nhpp, LgcpSeparable, LgcpNonseparable };

std::string to_string(ModelVariant v);
ModelVariant variant_from_string(const std::string& name);
inline bool is_lgcp(ModelVariant v) { return v != ModelVariant::Nhpp; }
inline CovarianceModel covariance_model(ModelVariant v) {
  return v == ModelVariant::LgcpNonseparable ? CovarianceModel::Nonseparable : CovarianceModel::Separable;
}

struct ModelState {
  ModelVariant variant = ModelVariant::Nhpp;
  std::vector<double> beta;
  std::vector<LandmarkSpec> landmarks;
  TemporalParams temporal;
  CovarianceParams cov;
  std::optional<WhitenedField> field;  // absent for the NHPP

  void validate(const SpaceTimeGrid& grid) const;
};

void to_json(nlohmann::json& j, const ModelState& s);
void from_json(const nlohmann::json& j, ModelState& s);

/// Directional Gaussian kernel exp(-1/2 d^T Sigma^-1 d), d = s - s*.
double landmark_covariate(const PlanarPoint& s, const LandmarkSpec& lm);

double log_lambda0(const PlanarPoint& s, std::span<const LandmarkSpec> landmarks, std::span<const double> beta);

/// log lambda0 at every spatial centroid of the grid.
Eigen::VectorXd log_lambda0_surface(const SpaceTimeGrid& grid, std::span<const LandmarkSpec> landmarks,
                                    std::span<const double> beta);

double kappa(double t, int w, const TemporalParams& tp);

double log_intensity(const SpaceTimeGrid& grid, std::size_t cell, int w, const ModelState& state);

/// Grid-approximated Poisson log likelihood, constants dropped:
///   sum_{j,w} n_{j,w} log lambda_{j,w} - lambda_{j,w} Delta_j.
/// Throws NumericalError naming the first cell with a non-finite intensity.
double log_likelihood(const SpaceTimeGrid& grid, const ModelState& state);

/// Fast evaluator used inside the samplers.  The likelihood is split as
///   sum_j [ n_j b_j - exp(b_j) E_j ] + sum_{t,w} n_{t,w} log kappa(t, w)
/// where b_j = log lambda0 + Z_j - sigma2/2 (no kappa), n_j are counts summed
/// over weekdays, and E_j = Delta_j * sum_w kappa(t_j, w) is the exposure.
class GridLikelihood {
 public:
  explicit GridLikelihood(const SpaceTimeGrid& grid);

  const Eigen::VectorXd& cell_totals() const { return totals_; }
  const Eigen::VectorXd& volumes() const { return volumes_; }

  Eigen::VectorXd exposure(const TemporalParams& tp) const;
  double temporal_term(const TemporalParams& tp) const;

  /// b_j for every space-time cell.
  Eigen::VectorXd log_base(const Eigen::VectorXd& log_lambda0, const Eigen::VectorXd* z, double sigma2) const;

  /// Returns -inf on overflow, NaN passes through.
  double evaluate(const Eigen::VectorXd& log_base, const Eigen::VectorXd& exposure, double temporal_term) const;

  double evaluate(const Eigen::VectorXd& log_lambda0, const Eigen::VectorXd* z, double sigma2,
                  const TemporalParams& tp) const;

 private:
  std::vector<double> time_centroids_;
  int classes_ = 1;
  Eigen::VectorXd totals_;          // per space-time cell, summed over weekdays
  Eigen::VectorXd volumes_;         // Delta_j
  Eigen::MatrixXd time_counts_;     // n_{t,w}: M x W
};

}  // namespace stcox
