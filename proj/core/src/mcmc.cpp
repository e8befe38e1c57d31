#include "stcox/mcmc.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"

namespace stcox {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::array<const char*, 8> kParamNames = {"beta", "rho", "mu", "delta", "sigma2", "phi_s", "phi_t", "gamma"};

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double initial_sd(Param p) {
  switch (p) {
    case Param::Beta:
      return 0.2;
    case Param::Rho:
      return 0.2;
    case Param::Mu:
      return 0.05;
    case Param::Delta:
      return 0.2;
    case Param::Sigma2:
      return 0.1;
    case Param::PhiS:
    case Param::PhiT:
      return 0.2;
    case Param::Gamma:
      return 0.5;
  }
  return 0.1;
}

}  // namespace

std::string to_string(Param p) { return kParamNames.at(static_cast<std::size_t>(p)); }

Param param_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    if (name == kParamNames[i]) return static_cast<Param>(i);
  }
  throw InputError("unknown parameter '" + name + "'");
}

std::vector<double> PosteriorChain::rho_posterior_means() const {
  std::vector<double> out(landmarks.size(), 0.0);
  if (draws.empty()) {
    for (std::size_t k = 0; k < landmarks.size(); ++k) out[k] = landmarks[k].rho;
    return out;
  }
  for (const auto& d : draws) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d.rho[k];
  }
  for (auto& v : out) v /= static_cast<double>(draws.size());
  return out;
}

bool mh_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

EssResult ess_update(const Eigen::VectorXd& nu, const Eigen::VectorXd& z, double log_likelihood,
                     const CovFactor& factor, const std::function<double(const Eigen::VectorXd&)>& field_log_likelihood,
                     Rng& rng) {
  const Eigen::VectorXd eta = standard_normal_vector(nu.size(), rng);
  // Z is linear in nu, so Z(nu cos w + eta sin w) = Z cos w + (L eta) sin w.
  const Eigen::VectorXd z_eta = factor.apply(eta);
  const double log_threshold = log_likelihood + std::log(uniform01(rng));

  double omega = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  double lower = omega - kTwoPi;
  double upper = omega;
  int shrinks = 0;
  while (true) {
    const double c = std::cos(omega);
    const double s = std::sin(omega);
    Eigen::VectorXd z_new = c * z + s * z_eta;
    const double ll = field_log_likelihood(z_new);
    if (ll > log_threshold) return {c * nu + s * eta, std::move(z_new), ll, shrinks};
    ++shrinks;
    if (omega < 0.0) {
      lower = omega;
    } else {
      upper = omega;
    }
    if (upper - lower < 1e-12) return {nu, z, log_likelihood, shrinks};
    omega = std::uniform_real_distribution<double>(lower, upper)(rng);
  }
}

Sampler::Sampler(const SpaceTimeGrid& grid, FitSpec spec, Rng& rng)
    : grid_(grid), spec_(std::move(spec)), likelihood_(grid_), landmarks_(spec_.landmarks), cov_(spec_.covariance) {
  (void)rng;
  const auto& opt = spec_.sampler;
  if (opt.thin == 0) throw InputError("thin must be >= 1");
  if (opt.burn_in > opt.iterations) throw InputError("burn-in exceeds iteration count");
  for (const auto& l : landmarks_) l.validate();
  const auto classes = static_cast<std::size_t>(grid_.weekday_classes());

  beta_ = spec_.initial_beta.value_or(std::vector<double>(landmarks_.size(), 0.0));
  if (beta_.size() != landmarks_.size()) throw ParameterError("one initial beta per landmark required");

  if (spec_.initial_temporal) {
    temporal_ = *spec_.initial_temporal;
  } else {
    // Constant-rate start: observed count per class over total exposure.
    const double delta0 = 0.5;
    const double offset = is_lgcp(spec_.variant) ? std::exp(0.5 * cov_.sigma2) : 1.0;
    double exposure = 0.0;
    for (std::size_t j = 0; j < grid_.n_cells(); ++j) {
      const bool evening = TemporalParams::in_evening(grid_.time_cells()[grid_.time_of(j)].centroid);
      exposure += grid_.volume(j) * (evening ? 1.0 + delta0 : 1.0);
    }
    temporal_ = TemporalParams::uniform(static_cast<int>(classes), 1.0, delta0);
    for (std::size_t w = 0; w < classes; ++w) {
      double n = 0.0;
      for (std::size_t j = 0; j < grid_.n_cells(); ++j) n += grid_.count(j, static_cast<int>(w));
      temporal_.mu[w] = std::max(n, 1.0) / exposure * offset;
    }
  }
  temporal_.validate();
  if (temporal_.classes() != classes) throw ParameterError("temporal parameters do not match weekday classes");

  refresh_landmark_design();
  refresh_log_lambda0();
  refresh_temporal();

  const auto cells = static_cast<Eigen::Index>(grid_.n_cells());
  if (is_lgcp(spec_.variant)) {
    structure_.emplace(grid_);
    factor_.emplace(structure_->factor(cov_, covariance_model(spec_.variant)));
    nu_ = spec_.initial_nu.value_or(Eigen::VectorXd::Zero(cells));
    if (nu_.size() != cells) throw ParameterError("initial nu has wrong length");
    z_ = factor_->apply(nu_);
  }

  const auto& fixed = opt.fixed;
  auto is_free = [&fixed](Param p) { return fixed.count(p) == 0; };
  std::vector<Coordinate> fixed_coords;
  for (std::size_t k = 0; k < landmarks_.size(); ++k) {
    if (is_free(Param::Beta)) fixed_coords.push_back({Param::Beta, k});
  }
  if (spec_.variant == ModelVariant::Nhpp) {
    for (std::size_t k = 0; k < landmarks_.size(); ++k) {
      if (is_free(Param::Rho)) fixed_coords.push_back({Param::Rho, k});
    }
  }
  for (std::size_t w = 0; w < classes; ++w) {
    if (is_free(Param::Mu)) fixed_coords.push_back({Param::Mu, w});
    if (is_free(Param::Delta)) fixed_coords.push_back({Param::Delta, w});
  }
  std::vector<Coordinate> hyper_coords;
  if (is_lgcp(spec_.variant)) {
    for (Param p : {Param::Sigma2, Param::PhiS, Param::PhiT}) {
      if (is_free(p)) hyper_coords.push_back({p, 0});
    }
    if (spec_.variant == ModelVariant::LgcpNonseparable && is_free(Param::Gamma)) {
      hyper_coords.push_back({Param::Gamma, 0});
    }
  }
  std::vector<Coordinate> level_coords;
  if (is_lgcp(spec_.variant) && spec_.sampler.level_moves) {
    for (const auto& c : fixed_coords) {
      if (c.param == Param::Beta) {
        level_coords.push_back(c);
        ++level_betas_;
      }
    }
    for (const auto& c : fixed_coords) {
      if (c.param == Param::Mu) {
        level_coords.push_back(c);
        level_mu_ = true;
      }
    }
  }
  fixed_ = make_block("covariates", std::move(fixed_coords));
  if (spec_.sampler.centred_moves) centred_ = make_block("covariance-centred", hyper_coords);
  hyper_ = make_block("covariance", std::move(hyper_coords));
  level_.coords = std::move(level_coords);
  level_.stats.name = "level";
  if (!level_.coords.empty()) {
    const auto dim = static_cast<Eigen::Index>(level_betas_ + (level_mu_ ? 1 : 0));
    level_.proposal = AdaptiveProposal(Eigen::VectorXd::Constant(dim, 0.1),
                                       dim > 1 ? kTargetAcceptMultivariate : kTargetAcceptScalar);
    if (!opt.adapt) level_.proposal.freeze();
  }

  for (const Block* b : {&fixed_, &hyper_}) {
    if (!b->coords.empty() && !std::isfinite(block_log_density(*b, block_point(*b)))) {
      throw ParameterError("initial " + b->stats.name + " parameters lie outside the prior support");
    }
  }

  log_likelihood_ = full_log_likelihood();
  if (!std::isfinite(log_likelihood_)) {
    throw NumericalError("non-finite log likelihood at the initial state: " + nlohmann::json(state()).dump());
  }
}

Sampler::Block Sampler::make_block(std::string name, std::vector<Coordinate> coords) const {
  Block b;
  b.coords = std::move(coords);
  b.stats.name = std::move(name);
  Eigen::VectorXd sd(static_cast<Eigen::Index>(b.coords.size()));
  for (std::size_t i = 0; i < b.coords.size(); ++i) sd[static_cast<Eigen::Index>(i)] = initial_sd(b.coords[i].param);
  const double target = b.coords.size() > 1 ? kTargetAcceptMultivariate : kTargetAcceptScalar;
  b.proposal = AdaptiveProposal(sd, target, b.coords.size() > 1 ? spec_.sampler.covariance_warmup : 0);
  if (!spec_.sampler.adapt) b.proposal.freeze();
  return b;
}

double& Sampler::value(const Coordinate& c) {
  switch (c.param) {
    case Param::Beta:
      return beta_[c.index];
    case Param::Rho:
      return landmarks_[c.index].rho;
    case Param::Mu:
      return temporal_.mu[c.index];
    case Param::Delta:
      return temporal_.delta[c.index];
    case Param::Sigma2:
      return cov_.sigma2;
    case Param::PhiS:
      return cov_.phi_s;
    case Param::PhiT:
      return cov_.phi_t;
    case Param::Gamma:
      return cov_.gamma;
  }
  throw std::logic_error("unhandled parameter");
}

double Sampler::value(const Coordinate& c) const { return const_cast<Sampler*>(this)->value(c); }

namespace {

struct Bounds {
  double lower;
  double upper;
};

}  // namespace

// Bounded parameters use a logit map onto (lower, upper), positive ones a log map.
double Sampler::to_unconstrained(const Coordinate& c, double x) const {
  const auto& pr = spec_.priors;
  auto logit = [](double x, Bounds iv) {
    const double f = (x - iv.lower) / (iv.upper - iv.lower);
    return std::log(f) - std::log1p(-f);
  };
  switch (c.param) {
    case Param::Beta:
      return x;
    case Param::Mu:
    case Param::Delta:
    case Param::Sigma2:
      return std::log(x);
    case Param::Rho:
      return logit(x, {pr.rho_min, pr.rho_max});
    case Param::PhiS:
      return logit(x, {0.0, pr.phi_s_max});
    case Param::PhiT:
      return logit(x, {0.0, pr.phi_t_max});
    case Param::Gamma:
      return logit(x, {0.0, pr.gamma_max});
  }
  return x;
}

namespace {

Bounds bounds_of(Param p, const PriorSpec& pr) {
  switch (p) {
    case Param::Rho:
      return {pr.rho_min, pr.rho_max};
    case Param::PhiS:
      return {0.0, pr.phi_s_max};
    case Param::PhiT:
      return {0.0, pr.phi_t_max};
    case Param::Gamma:
      return {0.0, pr.gamma_max};
    default:
      return {0.0, 1.0};
  }
}

}  // namespace

double Sampler::from_unconstrained(const Coordinate& c, double y) const {
  switch (c.param) {
    case Param::Beta:
      return y;
    case Param::Mu:
    case Param::Delta:
    case Param::Sigma2:
      return std::exp(y);
    default: {
      const Bounds iv = bounds_of(c.param, spec_.priors);
      return iv.lower + (iv.upper - iv.lower) / (1.0 + std::exp(-y));
    }
  }
}

double Sampler::log_jacobian(const Coordinate& c, double y) const {
  switch (c.param) {
    case Param::Beta:
      return 0.0;
    case Param::Mu:
    case Param::Delta:
    case Param::Sigma2:
      return y;
    default: {
      const Bounds iv = bounds_of(c.param, spec_.priors);
      return std::log(iv.upper - iv.lower) - softplus(-y) - softplus(y);
    }
  }
}

double Sampler::log_prior(const Coordinate& c, double x) const {
  const auto& pr = spec_.priors;
  switch (c.param) {
    case Param::Beta:
      return pr.log_beta(x);
    case Param::Rho:
      return pr.log_rho(x);
    case Param::Mu:
      return pr.log_mu(x);
    case Param::Delta:
      return pr.log_delta(x);
    case Param::Sigma2:
      return pr.log_sigma2(x);
    case Param::PhiS:
      return x > 0.0 ? pr.log_phi_s(x) : kNegInf;
    case Param::PhiT:
      return x > 0.0 ? pr.log_phi_t(x) : kNegInf;
    case Param::Gamma:
      return pr.log_gamma(x);
  }
  return kNegInf;
}

Eigen::VectorXd Sampler::block_point(const Block& b) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(b.coords.size()));
  for (std::size_t i = 0; i < b.coords.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = to_unconstrained(b.coords[i], value(b.coords[i]));
  }
  return y;
}

double Sampler::block_log_density(const Block& b, const Eigen::VectorXd& y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < b.coords.size(); ++i) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    acc += log_prior(b.coords[i], from_unconstrained(b.coords[i], yi));
    if (spec_.sampler.include_jacobian) acc += log_jacobian(b.coords[i], yi);
  }
  return acc;
}

void Sampler::set_block(const Block& b, const Eigen::VectorXd& y) {
  for (std::size_t i = 0; i < b.coords.size(); ++i) {
    value(b.coords[i]) = from_unconstrained(b.coords[i], y[static_cast<Eigen::Index>(i)]);
  }
}

void Sampler::refresh_landmark_design() {
  const auto n = static_cast<Eigen::Index>(grid_.n_spatial());
  design_.resize(n, static_cast<Eigen::Index>(landmarks_.size()));
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& site = grid_.spatial_cells()[static_cast<std::size_t>(s)].centroid;
    for (std::size_t k = 0; k < landmarks_.size(); ++k) {
      design_(s, static_cast<Eigen::Index>(k)) = landmark_covariate(site, landmarks_[k]);
    }
  }
}

void Sampler::refresh_log_lambda0() {
  log_lambda0_ = landmarks_.empty() ? Eigen::VectorXd::Zero(design_.rows())
                                    : Eigen::VectorXd(design_ * Eigen::Map<const Eigen::VectorXd>(
                                                                    beta_.data(), static_cast<Eigen::Index>(beta_.size())));
}

void Sampler::refresh_temporal() {
  exposure_ = likelihood_.exposure(temporal_);
  temporal_term_ = likelihood_.temporal_term(temporal_);
}

Eigen::VectorXd Sampler::field_offset() const {
  return likelihood_.log_base(log_lambda0_, nullptr, 0.0).array() - 0.5 * cov_.sigma2;
}

double Sampler::full_log_likelihood() const {
  if (spec_.sampler.flat_likelihood) return 0.0;
  const bool lgcp = is_lgcp(spec_.variant);
  return likelihood_.evaluate(likelihood_.log_base(log_lambda0_, lgcp ? &z_ : nullptr, cov_.sigma2), exposure_,
                              temporal_term_);
}

ModelState Sampler::state() const {
  ModelState s;
  s.variant = spec_.variant;
  s.beta = beta_;
  s.landmarks = landmarks_;
  s.temporal = temporal_;
  s.cov = cov_;
  if (is_lgcp(spec_.variant)) s.field = WhitenedField{nu_, z_};
  return s;
}

void Sampler::ess_step(Rng& rng) {
  if (!is_lgcp(spec_.variant)) return;
  const bool flat = spec_.sampler.flat_likelihood;
  const Eigen::VectorXd offset = field_offset();
  auto field_ll = [&](const Eigen::VectorXd& z) {
    return flat ? 0.0 : likelihood_.evaluate(offset + z, exposure_, temporal_term_);
  };
  auto result = ess_update(nu_, z_, log_likelihood_, *factor_, field_ll, rng);
  nu_ = std::move(result.nu);
  z_ = std::move(result.z);
  log_likelihood_ = result.log_likelihood;
  ++ess_calls_;
  ess_shrinks_ += static_cast<std::size_t>(result.shrinks);
}

bool Sampler::hyper_step(Rng& rng) { return covariance_step(hyper_, false, rng); }

bool Sampler::centred_hyper_step(Rng& rng) { return covariance_step(centred_, true, rng); }

bool Sampler::covariance_step(Block& block, bool centred, Rng& rng) {
  if (block.coords.empty()) return false;
  const Eigen::VectorXd y = block_point(block);
  const Eigen::VectorXd proposal = block.proposal.propose(y, rng);
  const double current_density = block_log_density(block, y);
  const double proposed_density = block_log_density(block, proposal);
  ++block.stats.proposed;

  double accept_probability = 0.0;
  bool accepted = false;
  if (std::isfinite(proposed_density)) {
    const CovarianceParams saved = cov_;
    set_block(block, proposal);
    std::optional<CovFactor> factor;
    Eigen::VectorXd nu = nu_;
    Eigen::VectorXd z = z_;
    double ll = kNegInf;
    double field_ratio = 0.0;
    try {
      factor.emplace(structure_->factor(cov_, covariance_model(spec_.variant)));
      if (centred) {
        // Density of Z under the new covariance against the old one.
        nu = factor->whiten(z_);
        field_ratio = -0.5 * (nu.squaredNorm() - nu_.squaredNorm()) -
                      0.5 * (factor->log_determinant() - factor_->log_determinant());
      } else {
        z = factor->apply(nu_);
      }
      ll = spec_.sampler.flat_likelihood
               ? 0.0
               : likelihood_.evaluate(likelihood_.log_base(log_lambda0_, &z, cov_.sigma2), exposure_, temporal_term_);
    } catch (const NumericalError&) {
      ++block.stats.failed_factorizations;
    } catch (const ParameterError&) {
      ++block.stats.failed_factorizations;
    }
    const double log_ratio = ll - log_likelihood_ + field_ratio + proposed_density - current_density;
    accept_probability = std::isnan(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio));
    if (factor && mh_accept(log_ratio, rng)) {
      factor_ = std::move(factor);
      nu_ = std::move(nu);
      z_ = std::move(z);
      log_likelihood_ = ll;
      accepted = true;
      ++block.stats.accepted;
    } else {
      cov_ = saved;
    }
  }
  block.proposal.update(accept_probability, block_point(block));
  block.recent_accepts += accepted ? 1.0 : 0.0;
  ++block.recent_count;
  return accepted;
}

bool Sampler::fixed_effects_step(Rng& rng) {
  if (fixed_.coords.empty()) return false;
  const Eigen::VectorXd y = block_point(fixed_);
  const Eigen::VectorXd proposal = fixed_.proposal.propose(y, rng);
  const double current_density = block_log_density(fixed_, y);
  const double proposed_density = block_log_density(fixed_, proposal);
  ++fixed_.stats.proposed;

  double accept_probability = 0.0;
  bool accepted = false;
  if (std::isfinite(proposed_density)) {
    const auto saved_beta = beta_;
    const auto saved_landmarks = landmarks_;
    const auto saved_temporal = temporal_;
    const Eigen::MatrixXd saved_design = design_;
    const Eigen::VectorXd saved_lambda0 = log_lambda0_;
    const Eigen::VectorXd saved_exposure = exposure_;
    const double saved_term = temporal_term_;

    set_block(fixed_, proposal);
    if (spec_.variant == ModelVariant::Nhpp && spec_.sampler.fixed.count(Param::Rho) == 0) refresh_landmark_design();
    refresh_log_lambda0();
    refresh_temporal();
    const double ll = full_log_likelihood();
    const double log_ratio = ll - log_likelihood_ + proposed_density - current_density;
    accept_probability = std::isnan(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio));
    if (mh_accept(log_ratio, rng)) {
      log_likelihood_ = ll;
      accepted = true;
      ++fixed_.stats.accepted;
    } else {
      beta_ = saved_beta;
      landmarks_ = saved_landmarks;
      temporal_ = saved_temporal;
      design_ = saved_design;
      log_lambda0_ = saved_lambda0;
      exposure_ = saved_exposure;
      temporal_term_ = saved_term;
    }
  }
  fixed_.proposal.update(accept_probability, block_point(fixed_));
  fixed_.recent_accepts += accepted ? 1.0 : 0.0;
  ++fixed_.recent_count;
  return accepted;
}

bool Sampler::level_step(Rng& rng) {
  if (level_.coords.empty()) return false;
  const auto dim = static_cast<Eigen::Index>(level_.proposal.dimension());
  const Eigen::VectorXd shift = level_.proposal.propose(Eigen::VectorXd::Zero(dim), rng);
  // Beta and log mu coordinates are unconstrained as they stand.
  const Eigen::VectorXd y = block_point(level_);
  Eigen::VectorXd proposal = y;
  const auto nb = static_cast<Eigen::Index>(level_betas_);
  proposal.head(nb) += shift.head(nb);
  if (level_mu_) proposal.tail(proposal.size() - nb).array() += shift[nb];
  ++level_.stats.proposed;

  // Spatial part of the intensity shift, repeated over time.
  Eigen::VectorXd spatial = Eigen::VectorXd::Constant(design_.rows(), level_mu_ ? shift[nb] : 0.0);
  for (Eigen::Index i = 0; i < nb; ++i) {
    spatial += shift[i] * design_.col(static_cast<Eigen::Index>(level_.coords[static_cast<std::size_t>(i)].index));
  }
  const auto m = static_cast<Eigen::Index>(grid_.n_time());
  Eigen::VectorXd dz(z_.size());
  for (Eigen::Index s = 0; s < spatial.size(); ++s) dz.segment(s * m, m).setConstant(spatial[s]);
  const Eigen::VectorXd nu = nu_ - factor_->whiten(dz);

  const double log_ratio = block_log_density(level_, proposal) - block_log_density(level_, y) -
                           0.5 * (nu.squaredNorm() - nu_.squaredNorm());
  const double accept_probability = std::isnan(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio));
  const bool accepted = mh_accept(log_ratio, rng);
  if (accepted) {
    set_block(level_, proposal);
    refresh_log_lambda0();
    refresh_temporal();
    nu_ = nu;
    z_ -= dz;
    log_likelihood_ = full_log_likelihood();
    ++level_.stats.accepted;
  }
  level_.proposal.update(accept_probability, Eigen::VectorXd::Zero(dim));
  level_.recent_accepts += accepted ? 1.0 : 0.0;
  ++level_.recent_count;
  return accepted;
}

void Sampler::sweep(Rng& rng) {
  for (int i = 0; i < spec_.sampler.ess_steps; ++i) ess_step(rng);
  hyper_step(rng);
  centred_hyper_step(rng);
  fixed_effects_step(rng);
  level_step(rng);
}

void Sampler::freeze_adaptation() {
  hyper_.proposal.freeze();
  centred_.proposal.freeze();
  fixed_.proposal.freeze();
  level_.proposal.freeze();
}

Draw Sampler::snapshot(std::size_t iteration) const {
  Draw d;
  d.iteration = iteration;
  d.beta = beta_;
  d.rho.reserve(landmarks_.size());
  for (const auto& l : landmarks_) d.rho.push_back(l.rho);
  d.mu = temporal_.mu;
  d.delta = temporal_.delta;
  d.cov = cov_;
  d.log_likelihood = log_likelihood_;
  if (spec_.sampler.store_fields) {
    const bool lgcp = is_lgcp(spec_.variant);
    if (lgcp) d.nu = nu_;
    d.log_base = likelihood_.log_base(log_lambda0_, lgcp ? &z_ : nullptr, cov_.sigma2);
  }
  return d;
}

PosteriorChain Sampler::run(Rng& rng) {
  const auto& opt = spec_.sampler;
  PosteriorChain chain;
  chain.variant = spec_.variant;
  chain.weekday_classes = grid_.weekday_classes();
  chain.n_spatial = grid_.n_spatial();
  chain.n_time = grid_.n_time();
  chain.priors = spec_.priors;
  chain.options = opt;
  chain.draws.reserve(opt.stored_draws());
  chain.log_likelihood_trace.reserve(opt.iterations);

  if (opt.burn_in == 0 || !opt.adapt) freeze_adaptation();
  constexpr std::size_t kReportEvery = 500;
  for (std::size_t it = 1; it <= opt.iterations; ++it) {
    sweep(rng);
    if (std::isnan(log_likelihood_)) {
      throw NumericalError("log likelihood became NaN at iteration " + std::to_string(it) +
                           "; state: " + nlohmann::json(state()).dump());
    }
    chain.log_likelihood_trace.push_back(log_likelihood_);
    if (it <= opt.burn_in && it % kReportEvery == 0) {
      for (Block* b : {&hyper_, &centred_, &fixed_, &level_}) {
        if (b->coords.empty()) continue;
        chain.adaptation.push_back(
            {it, b->stats.name, b->proposal.scale(), b->recent_accepts / std::max<std::size_t>(b->recent_count, 1)});
        b->recent_accepts = 0.0;
        b->recent_count = 0;
      }
    }
    if (it == opt.burn_in) freeze_adaptation();
    if (it > opt.burn_in && (it - opt.burn_in) % opt.thin == 0) chain.draws.push_back(snapshot(it));
  }

  chain.landmarks = landmarks_;
  for (Block* b : {&fixed_, &hyper_, &centred_, &level_}) {
    if (b->coords.empty()) continue;
    b->stats.final_scale = b->proposal.scale();
    chain.blocks.push_back(b->stats);
  }
  chain.mean_ess_shrinks = ess_calls_ ? static_cast<double>(ess_shrinks_) / ess_calls_ : 0.0;
  return chain;
}

PosteriorChain fit(const SpaceTimeGrid& grid, const FitSpec& spec, Rng& rng) {
  Sampler sampler(grid, spec, rng);
  return sampler.run(rng);
}

PosteriorChain fit_nhpp(const SpaceTimeGrid& grid, std::vector<LandmarkSpec> landmarks, const PriorSpec& priors,
                        const SamplerOptions& options, Rng& rng) {
  FitSpec spec;
  spec.variant = ModelVariant::Nhpp;
  spec.landmarks = std::move(landmarks);
  spec.priors = priors;
  spec.sampler = options;
  return fit(grid, spec, rng);
}

PosteriorChain fit_lgcp(const SpaceTimeGrid& grid, std::vector<LandmarkSpec> landmarks, const PriorSpec& priors,
                        ModelVariant variant, const CovarianceParams& covariance, const SamplerOptions& options,
                        Rng& rng) {
  if (!is_lgcp(variant)) throw InputError("fit_lgcp needs an LGCP variant");
  FitSpec spec;
  spec.variant = variant;
  spec.landmarks = std::move(landmarks);
  spec.priors = priors;
  spec.sampler = options;
  spec.covariance = covariance;
  if (variant == ModelVariant::LgcpSeparable) spec.covariance.gamma = 0.0;
  return fit(grid, spec, rng);
}

std::vector<LandmarkSpec> plug_in_rho(std::vector<LandmarkSpec> landmarks, const PosteriorChain& nhpp_chain) {
  const auto means = nhpp_chain.rho_posterior_means();
  if (means.size() != landmarks.size()) throw InputError("landmark count differs from the NHPP chain");
  for (std::size_t k = 0; k < landmarks.size(); ++k) landmarks[k].rho = means[k];
  return landmarks;
}

Eigen::VectorXd expected_counts(const Draw& draw, const SpaceTimeGrid& grid) {
  if (static_cast<std::size_t>(draw.log_base.size()) != grid.n_cells()) {
    throw InputError("draw does not carry an intensity surface for this grid");
  }
  const TemporalParams tp{draw.mu, draw.delta};
  Eigen::VectorXd per_time(static_cast<Eigen::Index>(grid.n_time()));
  for (std::size_t t = 0; t < grid.n_time(); ++t) {
    double sum = 0.0;
    for (int w = 0; w < grid.weekday_classes(); ++w) sum += kappa(grid.time_cells()[t].centroid, w, tp);
    per_time[static_cast<Eigen::Index>(t)] = sum;
  }
  Eigen::VectorXd out(draw.log_base.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const auto cell = static_cast<std::size_t>(j);
    out[j] = std::exp(draw.log_base[j]) * grid.volume(cell) * per_time[static_cast<Eigen::Index>(grid.time_of(cell))];
  }
  return out;
}

}  // namespace stcox
