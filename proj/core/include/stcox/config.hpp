#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stcox/covariance.hpp"
#include "stcox/geomtime.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/model.hpp"
#include "stcox/priors.hpp"
#include "stcox/validate.hpp"

namespace stcox {

inline constexpr const char* kEnvPrefix = "STCOX_";

/// Every key with its default value.
nlohmann::json default_config();

/// Applies STCOX_A__B=value as config["a"]["b"] = value.  Values that parse as
/// JSON keep their type, anything else is taken as a string.
void apply_env_overrides(nlohmann::json& config, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> environment_with_prefix(const std::string& prefix = kEnvPrefix);

/// Defaults, then the file (if any), then environment overrides.
nlohmann::json load_config(const std::optional<std::string>& path,
                           const std::map<std::string, std::string>& env = environment_with_prefix());

struct LandmarkConfig {
  std::string name;
  std::optional<GeoPoint> geo;
  std::optional<PlanarPoint> planar;
  std::optional<double> rho;
  std::optional<double> sigma1;
  std::optional<double> sigma2;
};

struct RunConfig {
  nlohmann::json resolved;

  std::string events_path;
  std::string output_dir;
  GeoPoint reference;
  Region region;
  int nx = 10;
  int ny = 10;
  int n_time = 48;
  int weekday_classes = 7;
  std::vector<LandmarkConfig> landmarks;
  std::optional<std::string> type_filter;

  ModelVariant variant = ModelVariant::LgcpSeparable;
  PriorSpec priors;
  CovarianceParams covariance;  // initial values for the sampler
  SamplerOptions sampler;
  std::uint64_t seed = 1;
  int chains = 1;
  int threads = 1;

  ScoringOptions validation;

  // simulate
  ModelState truth;
  bool emit_points = true;

  /// True when every landmark carries a rho override.
  bool rho_overridden() const;
};

/// Typed view of a resolved config; throws InputError on invalid values.
RunConfig parse_config(const nlohmann::json& resolved);

/// Landmarks on the planar frame, kernel scales defaulting to the grid spacing.
std::vector<LandmarkSpec> build_landmarks(const RunConfig& cfg, const SpaceTimeGrid& grid);

}  // namespace stcox
