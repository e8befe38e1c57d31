#include "stcox/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "stcox/errors.hpp"

extern char** environ;

namespace stcox {

nlohmann::json default_config() {
  const PriorSpec priors;
  const CovarianceParams cov;
  const SamplerOptions sampler;
  const ScoringOptions scoring;
  std::vector<std::string> ranges;
  for (TimeRange r : scoring.ranges) ranges.push_back(to_string(r));
  return {
      {"events", ""},
      {"output", "stcox-out"},
      {"reference", {{"lat", 37.7749}, {"lon", -122.4194}}},
      {"region", {{"x_min", -5.0}, {"x_max", 5.0}, {"y_min", -5.0}, {"y_max", 5.0}}},
      {"grid", {{"nx", 10}, {"ny", 10}, {"n_time", 48}, {"weekday_classes", 7}}},
      {"landmarks", nlohmann::json::array()},
      {"type_filter", nullptr},
      {"variant", "lgcp-sep"},
      {"priors", priors},
      {"covariance", cov},
      {"mcmc",
       {{"iterations", sampler.iterations},
        {"burn_in", sampler.burn_in},
        {"thin", sampler.thin},
        {"ess_steps", sampler.ess_steps},
        {"covariance_warmup", sampler.covariance_warmup},
        {"level_moves", sampler.level_moves},
        {"centred_moves", sampler.centred_moves},
        {"chains", 1}}},
      {"seed", 1},
      {"threads", 1},
      {"validation",
       {{"p", scoring.p}, {"q", scoring.q}, {"subsets", scoring.subsets}, {"nominal", scoring.nominal},
        {"ranges", ranges}, {"subset_seed", nullptr}}},
      {"simulate",
       {{"emit_points", true},
        {"truth",
         {{"variant", "lgcp-sep"},
          {"beta", nlohmann::json::array()},
          {"temporal", {{"mu", {1.0}}, {"delta", {0.5}}}},
          {"covariance", cov}}}}},
  };
}

std::map<std::string, std::string> environment_with_prefix(const std::string& prefix) {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.compare(0, prefix.size(), prefix) != 0) continue;
    out[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return out;
}

void apply_env_overrides(nlohmann::json& config, const std::map<std::string, std::string>& env) {
  const std::string prefix = kEnvPrefix;
  for (const auto& [key, raw] : env) {
    if (key.compare(0, prefix.size(), prefix) != 0) continue;
    std::string path = key.substr(prefix.size());
    for (auto& c : path) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    nlohmann::json* node = &config;
    std::size_t start = 0;
    while (true) {
      const auto sep = path.find("__", start);
      const std::string part = path.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
      if (part.empty()) throw InputError("malformed config override " + key);
      if (!node->is_object()) throw InputError("config override " + key + " descends into a non-object");
      if (sep == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = sep + 2;
    }
  }
}

nlohmann::json load_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& env) {
  nlohmann::json config = default_config();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw InputError("cannot open config file '" + *path + "'");
    nlohmann::json file = nlohmann::json::parse(in, nullptr, false, true);
    if (file.is_discarded() || !file.is_object()) throw InputError("config file '" + *path + "' is not a JSON object");
    config.merge_patch(file);
  }
  apply_env_overrides(config, env);
  return config;
}

bool RunConfig::rho_overridden() const {
  if (landmarks.empty()) return true;
  for (const auto& l : landmarks) {
    if (!l.rho) return false;
  }
  return true;
}

namespace {

template <class T>
T get(const nlohmann::json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config ") + section + "." + key + ": " + e.what());
  }
}

template <class T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config ") + key + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& resolved) {
  RunConfig c;
  c.resolved = resolved;
  try {
    c.events_path = get<std::string>(resolved, "events");
    c.output_dir = get<std::string>(resolved, "output");
    c.reference = {get<double>(resolved, "reference", "lat"), get<double>(resolved, "reference", "lon")};
    c.region = resolved.at("region").get<Region>();
    c.region.validate();
    c.nx = get<int>(resolved, "grid", "nx");
    c.ny = get<int>(resolved, "grid", "ny");
    c.n_time = get<int>(resolved, "grid", "n_time");
    c.weekday_classes = get<int>(resolved, "grid", "weekday_classes");
    if (c.nx < 1 || c.ny < 1 || c.n_time < 1) throw InputError("grid dimensions must be >= 1");
    if (c.weekday_classes != 1 && c.weekday_classes != kDaysPerWeek) {
      throw InputError("grid.weekday_classes must be 1 or 7");
    }
    for (const auto& l : resolved.at("landmarks")) {
      LandmarkConfig lc;
      lc.name = l.value("name", std::string{});
      if (l.contains("lat") && l.contains("lon")) lc.geo = GeoPoint{l.at("lat").get<double>(), l.at("lon").get<double>()};
      if (l.contains("easting") && l.contains("northing")) {
        lc.planar = PlanarPoint{l.at("easting").get<double>(), l.at("northing").get<double>()};
      }
      if (!lc.geo && !lc.planar) throw InputError("landmark '" + lc.name + "' needs lat/lon or easting/northing");
      if (l.contains("rho") && !l.at("rho").is_null()) lc.rho = l.at("rho").get<double>();
      if (l.contains("sigma1")) lc.sigma1 = l.at("sigma1").get<double>();
      if (l.contains("sigma2")) lc.sigma2 = l.at("sigma2").get<double>();
      c.landmarks.push_back(std::move(lc));
    }
    if (!resolved.at("type_filter").is_null()) c.type_filter = resolved.at("type_filter").get<std::string>();

    c.variant = variant_from_string(get<std::string>(resolved, "variant"));
    c.priors = resolved.at("priors").get<PriorSpec>();
    c.covariance = resolved.at("covariance").get<CovarianceParams>();
    c.sampler.iterations = get<std::size_t>(resolved, "mcmc", "iterations");
    c.sampler.burn_in = get<std::size_t>(resolved, "mcmc", "burn_in");
    c.sampler.thin = get<std::size_t>(resolved, "mcmc", "thin");
    c.sampler.ess_steps = get<int>(resolved, "mcmc", "ess_steps");
    c.sampler.covariance_warmup = get<std::size_t>(resolved, "mcmc", "covariance_warmup");
    c.sampler.level_moves = get<bool>(resolved, "mcmc", "level_moves");
    c.sampler.centred_moves = get<bool>(resolved, "mcmc", "centred_moves");
    c.chains = get<int>(resolved, "mcmc", "chains");
    if (c.sampler.thin == 0) throw InputError("mcmc.thin must be >= 1");
    if (c.sampler.burn_in > c.sampler.iterations) throw InputError("mcmc.burn_in exceeds mcmc.iterations");
    if (c.chains < 1) throw InputError("mcmc.chains must be >= 1");
    c.seed = get<std::uint64_t>(resolved, "seed");
    c.threads = get<int>(resolved, "threads");
    if (c.threads < 1) throw InputError("threads must be >= 1");

    const auto& v = resolved.at("validation");
    c.validation.p = v.at("p").get<double>();
    c.validation.q = v.at("q").get<std::vector<double>>();
    c.validation.subsets = v.at("subsets").get<std::size_t>();
    c.validation.nominal = v.at("nominal").get<double>();
    c.validation.ranges.clear();
    for (const auto& r : v.at("ranges")) c.validation.ranges.push_back(time_range_from_string(r.get<std::string>()));
    c.validation.subset_seed = v.at("subset_seed").is_null() ? c.seed : v.at("subset_seed").get<std::uint64_t>();
    if (!(c.validation.p > 0.0 && c.validation.p < 1.0)) throw InputError("validation.p must lie in (0, 1)");
    if (!(c.validation.nominal > 0.0 && c.validation.nominal < 1.0)) {
      throw InputError("validation.nominal must lie in (0, 1)");
    }

    const auto& sim = resolved.at("simulate");
    c.emit_points = sim.value("emit_points", true);
    c.truth = sim.at("truth").get<ModelState>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  } catch (const ParameterError& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  return c;
}

std::vector<LandmarkSpec> build_landmarks(const RunConfig& cfg, const SpaceTimeGrid& grid) {
  std::vector<LandmarkSpec> out;
  for (const auto& l : cfg.landmarks) {
    const PlanarPoint p = l.planar ? *l.planar : project(*l.geo, cfg.reference);
    LandmarkSpec spec = make_landmark(l.name, p, grid, l.rho.value_or(0.0));
    if (l.sigma1) spec.sigma1 = *l.sigma1;
    if (l.sigma2) spec.sigma2 = *l.sigma2;
    try {
      spec.validate();
    } catch (const ParameterError& e) {
      throw InputError("landmark '" + l.name + "': " + e.what());
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace stcox
