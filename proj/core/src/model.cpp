#include "stcox/model.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"

namespace stcox {

void LandmarkSpec::validate() const {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw ParameterError("landmark kernel scales must be positive");
  if (!(std::abs(rho) < 1.0)) throw ParameterError("landmark correlation must lie in (-1, 1)");
}

LandmarkSpec make_landmark(std::string name, PlanarPoint location, const SpaceTimeGrid& grid, double rho) {
  return {std::move(name), location, grid.cell_width(), grid.cell_height(), rho};
}

void to_json(nlohmann::json& j, const LandmarkSpec& l) {
  j = nlohmann::json{{"name", l.name},     {"easting", l.location.easting}, {"northing", l.location.northing},
                     {"sigma1", l.sigma1}, {"sigma2", l.sigma2},            {"rho", l.rho}};
}

void from_json(const nlohmann::json& j, LandmarkSpec& l) {
  l.name = j.value("name", std::string{});
  l.location = {j.at("easting").get<double>(), j.at("northing").get<double>()};
  l.sigma1 = j.value("sigma1", 1.0);
  l.sigma2 = j.value("sigma2", 1.0);
  l.rho = j.value("rho", 0.0);
}

TemporalParams TemporalParams::uniform(int classes, double mu, double delta) {
  return {std::vector<double>(static_cast<std::size_t>(classes), mu),
          std::vector<double>(static_cast<std::size_t>(classes), delta)};
}

void TemporalParams::validate() const {
  if (mu.empty() || mu.size() != delta.size()) throw ParameterError("mu and delta need one entry per weekday class");
  for (std::size_t w = 0; w < mu.size(); ++w) {
    if (!(mu[w] > 0.0)) throw ParameterError("mu must be positive");
    if (!(delta[w] >= 0.0)) throw ParameterError("delta must be nonnegative");
  }
}

void to_json(nlohmann::json& j, const TemporalParams& t) { j = nlohmann::json{{"mu", t.mu}, {"delta", t.delta}}; }

void from_json(const nlohmann::json& j, TemporalParams& t) {
  t.mu = j.at("mu").get<std::vector<double>>();
  t.delta = j.at("delta").get<std::vector<double>>();
}

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Nhpp:
      return "nhpp";
    case ModelVariant::LgcpSeparable:
      return "lgcp-sep";
    case ModelVariant::LgcpNonseparable:
      return "lgcp-nonsep";
  }
  return "unknown";
}

ModelVariant variant_from_string(const std::string& name) {
  if (name == "nhpp") return ModelVariant::Nhpp;
  if (name == "lgcp-sep") return ModelVariant::LgcpSeparable;
  if (name == "lgcp-nonsep") return ModelVariant::LgcpNonseparable;
  throw InputError("unknown model variant '" + name + "' (expected nhpp, lgcp-sep or lgcp-nonsep)");
}

void ModelState::validate(const SpaceTimeGrid& grid) const {
  if (beta.size() != landmarks.size()) throw ParameterError("one beta per landmark required");
  for (const auto& l : landmarks) l.validate();
  temporal.validate();
  if (temporal.classes() != static_cast<std::size_t>(grid.weekday_classes())) {
    throw ParameterError("temporal parameters do not match the grid's weekday classes");
  }
  if (is_lgcp(variant)) {
    cov.validate();
    if (field && static_cast<std::size_t>(field->z.size()) != grid.n_cells()) {
      throw ParameterError("field dimension does not match grid");
    }
  }
}

void to_json(nlohmann::json& j, const ModelState& s) {
  j = nlohmann::json{{"variant", to_string(s.variant)},
                     {"beta", s.beta},
                     {"landmarks", s.landmarks},
                     {"temporal", s.temporal},
                     {"covariance", s.cov}};
}

void from_json(const nlohmann::json& j, ModelState& s) {
  s.variant = variant_from_string(j.value("variant", std::string{"nhpp"}));
  s.beta = j.value("beta", std::vector<double>{});
  s.landmarks = j.value("landmarks", std::vector<LandmarkSpec>{});
  if (j.contains("temporal")) s.temporal = j.at("temporal").get<TemporalParams>();
  if (j.contains("covariance")) s.cov = j.at("covariance").get<CovarianceParams>();
}

double landmark_covariate(const PlanarPoint& s, const LandmarkSpec& lm) {
  lm.validate();
  const double x = (s.easting - lm.location.easting) / lm.sigma1;
  const double y = (s.northing - lm.location.northing) / lm.sigma2;
  const double q = (x * x - 2.0 * lm.rho * x * y + y * y) / (1.0 - lm.rho * lm.rho);
  return std::exp(-0.5 * q);
}

double log_lambda0(const PlanarPoint& s, std::span<const LandmarkSpec> landmarks, std::span<const double> beta) {
  if (landmarks.size() != beta.size()) throw ParameterError("one beta per landmark required");
  double acc = 0.0;
  for (std::size_t k = 0; k < landmarks.size(); ++k) acc += beta[k] * landmark_covariate(s, landmarks[k]);
  return acc;
}

Eigen::VectorXd log_lambda0_surface(const SpaceTimeGrid& grid, std::span<const LandmarkSpec> landmarks,
                                    std::span<const double> beta) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.n_spatial()));
  for (std::size_t s = 0; s < grid.n_spatial(); ++s) {
    out[static_cast<Eigen::Index>(s)] = log_lambda0(grid.spatial_cells()[s].centroid, landmarks, beta);
  }
  return out;
}

double kappa(double t, int w, const TemporalParams& tp) {
  const auto i = static_cast<std::size_t>(w);
  return TemporalParams::in_evening(t) ? tp.mu.at(i) * (1.0 + tp.delta.at(i)) : tp.mu.at(i);
}

double log_intensity(const SpaceTimeGrid& grid, std::size_t cell, int w, const ModelState& state) {
  const auto& site = grid.spatial_cells()[grid.spatial_of(cell)];
  const double t = grid.time_cells()[grid.time_of(cell)].centroid;
  double out = log_lambda0(site.centroid, state.landmarks, state.beta) + std::log(kappa(t, w, state.temporal));
  if (is_lgcp(state.variant)) {
    if (!state.field) throw ParameterError("LGCP state has no field");
    out += -0.5 * state.cov.sigma2 + state.field->z[static_cast<Eigen::Index>(cell)];
  }
  return out;
}

double log_likelihood(const SpaceTimeGrid& grid, const ModelState& state) {
  state.validate(grid);
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.n_cells(); ++j) {
    for (int w = 0; w < grid.weekday_classes(); ++w) {
      const double log_lambda = log_intensity(grid, j, w, state);
      const double lambda = std::exp(log_lambda);
      if (!std::isfinite(log_lambda) || !std::isfinite(lambda)) {
        throw NumericalError("non-finite intensity at cell " + std::to_string(j) + ", weekday class " +
                             std::to_string(w));
      }
      acc += grid.count(j, w) * log_lambda - lambda * grid.volume(j);
    }
  }
  return acc;
}

GridLikelihood::GridLikelihood(const SpaceTimeGrid& grid) : classes_(grid.weekday_classes()) {
  for (const auto& t : grid.time_cells()) time_centroids_.push_back(t.centroid);
  const auto cells = static_cast<Eigen::Index>(grid.n_cells());
  const int classes = grid.weekday_classes();
  totals_ = Eigen::VectorXd::Zero(cells);
  volumes_.resize(cells);
  time_counts_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.n_time()), classes);
  for (Eigen::Index j = 0; j < cells; ++j) {
    const auto cell = static_cast<std::size_t>(j);
    volumes_[j] = grid.volume(cell);
    for (int w = 0; w < classes; ++w) {
      const int n = grid.count(cell, w);
      totals_[j] += n;
      time_counts_(static_cast<Eigen::Index>(grid.time_of(cell)), w) += n;
    }
  }
}

Eigen::VectorXd GridLikelihood::exposure(const TemporalParams& tp) const {
  const auto m = static_cast<Eigen::Index>(time_centroids_.size());
  Eigen::VectorXd per_time(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    double sum = 0.0;
    for (int w = 0; w < classes_; ++w) sum += kappa(time_centroids_[static_cast<std::size_t>(t)], w, tp);
    per_time[t] = sum;
  }
  Eigen::VectorXd out(volumes_.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = volumes_[j] * per_time[j % m];
  return out;
}

double GridLikelihood::temporal_term(const TemporalParams& tp) const {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < time_counts_.rows(); ++t) {
    const double centroid = time_centroids_[static_cast<std::size_t>(t)];
    for (Eigen::Index w = 0; w < time_counts_.cols(); ++w) {
      const double n = time_counts_(t, w);
      if (n > 0.0) acc += n * std::log(kappa(centroid, static_cast<int>(w), tp));
    }
  }
  return acc;
}

Eigen::VectorXd GridLikelihood::log_base(const Eigen::VectorXd& log_lambda0, const Eigen::VectorXd* z,
                                         double sigma2) const {
  const auto m = static_cast<Eigen::Index>(time_centroids_.size());
  Eigen::VectorXd b(volumes_.size());
  for (Eigen::Index s = 0; s < log_lambda0.size(); ++s) b.segment(s * m, m).setConstant(log_lambda0[s]);
  if (z != nullptr) b += *z - Eigen::VectorXd::Constant(b.size(), 0.5 * sigma2);
  return b;
}

double GridLikelihood::evaluate(const Eigen::VectorXd& log_base, const Eigen::VectorXd& exposure,
                                double temporal_term) const {
  const double linear = totals_.dot(log_base);
  const double expected = (log_base.array().exp() * exposure.array()).sum();
  if (std::isinf(expected)) return -std::numeric_limits<double>::infinity();
  return linear - expected + temporal_term;
}

double GridLikelihood::evaluate(const Eigen::VectorXd& log_lambda0, const Eigen::VectorXd* z, double sigma2,
                                const TemporalParams& tp) const {
  return evaluate(log_base(log_lambda0, z, sigma2), exposure(tp), temporal_term(tp));
}

}  // namespace stcox
