#pragma once

// Posterior sampling for the NHPP and LGCP grid models.
//
// One sweep of the LGCP sampler is
//   1. elliptical slice updates of the whitened field nu (Z = L_theta nu),
//   2. a random-walk MH block over the covariance hyperparameters theta with
//      nu held fixed, so the GP prior density never has to be evaluated,
//   3. a random-walk MH block over the covariate parameters (beta, mu, delta,
//      and rho for the NHPP).
// Every block moves on an unconstrained scale (log / logit / identity) and
// carries the Jacobian of that transform in its acceptance ratio.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stcox/adaptation.hpp"
#include "stcox/covariance.hpp"
#include "stcox/geomtime.hpp"
#include "stcox/gp.hpp"
#include "stcox/model.hpp"
#include "stcox/priors.hpp"
#include "stcox/random.hpp"

namespace stcox {

enum class Param { Beta, Rho, Mu, Delta, Sigma2, PhiS, PhiT, Gamma };

std::string to_string(Param p);
Param param_from_string(const std::string& name);

struct SamplerOptions {
  std::size_t iterations = 150000;
  std::size_t burn_in = 100000;
  std::size_t thin = 50;
  int ess_steps = 1;
  bool adapt = true;
  // Adaptation steps before a block switches to its empirical covariance.
  std::size_t covariance_warmup = 1000;
  // Parameters held at their initial values.
  std::set<Param> fixed;
  // Intensity-preserving joint moves of (log mu, beta, Z); LGCP only.
  bool level_moves = true;
  // Extra covariance update with Z held fixed; LGCP only.
  bool centred_moves = true;
  // Replace the likelihood by a constant; the chain then targets the prior.
  bool flat_likelihood = false;
  // Only for demonstrating that the transformed-scale Jacobian is required.
  bool include_jacobian = true;
  bool store_fields = true;

  std::size_t stored_draws() const { return iterations > burn_in ? (iterations - burn_in) / thin : 0; }
};

struct Draw {
  std::size_t iteration = 0;
  std::vector<double> beta;
  std::vector<double> rho;
  std::vector<double> mu;
  std::vector<double> delta;
  CovarianceParams cov;
  double log_likelihood = 0.0;
  Eigen::VectorXd nu;        // empty for the NHPP or when fields are not stored
  Eigen::VectorXd log_base;  // log lambda0 + Z - sigma2/2 per space-time cell (no kappa)
};

struct BlockStats {
  std::string name;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::size_t failed_factorizations = 0;
  double final_scale = 1.0;

  double acceptance_rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct AdaptationRecord {
  std::size_t iteration = 0;
  std::string block;
  double scale = 1.0;
  double acceptance_rate = 0.0;
};

struct PosteriorChain {
  ModelVariant variant = ModelVariant::Nhpp;
  std::vector<LandmarkSpec> landmarks;
  int weekday_classes = 1;
  std::size_t n_spatial = 0;
  std::size_t n_time = 0;
  PriorSpec priors;
  SamplerOptions options;
  std::vector<Draw> draws;
  std::vector<double> log_likelihood_trace;  // one entry per iteration
  std::vector<BlockStats> blocks;
  std::vector<AdaptationRecord> adaptation;
  double mean_ess_shrinks = 0.0;

  std::vector<double> rho_posterior_means() const;
};

struct FitSpec {
  ModelVariant variant = ModelVariant::LgcpSeparable;
  std::vector<LandmarkSpec> landmarks;
  PriorSpec priors;
  SamplerOptions sampler;
  // Initial covariance values; alpha and cauchy_shape are never sampled.
  CovarianceParams covariance;
  std::optional<std::vector<double>> initial_beta;
  std::optional<TemporalParams> initial_temporal;
  std::optional<Eigen::VectorXd> initial_nu;
};

struct EssResult {
  Eigen::VectorXd nu;
  Eigen::VectorXd z;
  double log_likelihood = 0.0;
  int shrinks = 0;
};

/// One elliptical slice move for nu with Z = L nu.  Never rejects: the
/// bracket shrinks toward the current state until the slice is hit.
EssResult ess_update(const Eigen::VectorXd& nu, const Eigen::VectorXd& z, double log_likelihood,
                     const CovFactor& factor, const std::function<double(const Eigen::VectorXd&)>& field_log_likelihood,
                     Rng& rng);

/// MH acceptance test on a log ratio; -inf and NaN reject.
bool mh_accept(double log_ratio, Rng& rng);

class Sampler {
 public:
  Sampler(const SpaceTimeGrid& grid, FitSpec spec, Rng& rng);

  double log_likelihood() const { return log_likelihood_; }
  const Eigen::VectorXd& nu() const { return nu_; }
  const Eigen::VectorXd& z() const { return z_; }
  ModelState state() const;
  const FitSpec& spec() const { return spec_; }

  void ess_step(Rng& rng);
  /// Covariance hyperparameter block with nu held fixed; false when rejected
  /// or when the block is empty.
  bool hyper_step(Rng& rng);
  /// Same block with Z held fixed and nu recomputed.
  bool centred_hyper_step(Rng& rng);
  /// Covariate parameter block.
  bool fixed_effects_step(Rng& rng);
  /// LGCP only: shifts log mu and beta jointly with an opposite shift of Z,
  /// which leaves the intensity unchanged.
  bool level_step(Rng& rng);
  void sweep(Rng& rng);

  AdaptiveProposal& hyper_proposal() { return hyper_.proposal; }
  AdaptiveProposal& fixed_effects_proposal() { return fixed_.proposal; }
  const BlockStats& hyper_stats() const { return hyper_.stats; }
  const BlockStats& fixed_effects_stats() const { return fixed_.stats; }
  const BlockStats& level_stats() const { return level_.stats; }
  const BlockStats& centred_hyper_stats() const { return centred_.stats; }
  void freeze_adaptation();

  PosteriorChain run(Rng& rng);

 private:
  struct Coordinate {
    Param param;
    std::size_t index;
  };
  struct Block {
    std::vector<Coordinate> coords;
    AdaptiveProposal proposal;
    BlockStats stats;
    double recent_accepts = 0.0;
    std::size_t recent_count = 0;
  };

  double& value(const Coordinate& c);
  double value(const Coordinate& c) const;
  double to_unconstrained(const Coordinate& c, double x) const;
  double from_unconstrained(const Coordinate& c, double y) const;
  double log_jacobian(const Coordinate& c, double y) const;
  double log_prior(const Coordinate& c, double x) const;
  Eigen::VectorXd block_point(const Block& b) const;
  double block_log_density(const Block& b, const Eigen::VectorXd& y) const;
  void set_block(const Block& b, const Eigen::VectorXd& y);
  Block make_block(std::string name, std::vector<Coordinate> coords) const;

  void refresh_landmark_design();
  void refresh_log_lambda0();
  void refresh_temporal();
  double full_log_likelihood() const;
  Eigen::VectorXd field_offset() const;
  Draw snapshot(std::size_t iteration) const;

  SpaceTimeGrid grid_;
  FitSpec spec_;
  GridLikelihood likelihood_;
  std::optional<CovarianceStructure> structure_;
  std::vector<LandmarkSpec> landmarks_;
  std::vector<double> beta_;
  TemporalParams temporal_;
  CovarianceParams cov_;

  Eigen::MatrixXd design_;        // g_k(s_j): N x K
  Eigen::VectorXd log_lambda0_;   // N
  Eigen::VectorXd exposure_;      // NM
  double temporal_term_ = 0.0;
  std::optional<CovFactor> factor_;
  Eigen::VectorXd nu_;
  Eigen::VectorXd z_;
  double log_likelihood_ = 0.0;

  bool covariance_step(Block& block, bool centred, Rng& rng);

  Block hyper_;
  Block centred_;
  Block fixed_;
  // Coordinates are the free beta and mu entries; the proposal has one
  // entry per free beta plus one common log mu shift.
  Block level_;
  std::size_t level_betas_ = 0;
  bool level_mu_ = false;
  std::size_t ess_calls_ = 0;
  std::size_t ess_shrinks_ = 0;
};

PosteriorChain fit(const SpaceTimeGrid& grid, const FitSpec& spec, Rng& rng);

/// MH over beta, rho, mu, delta.
PosteriorChain fit_nhpp(const SpaceTimeGrid& grid, std::vector<LandmarkSpec> landmarks, const PriorSpec& priors,
                        const SamplerOptions& options, Rng& rng);

/// LGCP fit with the landmark correlations held at the values carried by
/// `landmarks` (normally the NHPP posterior means, see plug_in_rho).
PosteriorChain fit_lgcp(const SpaceTimeGrid& grid, std::vector<LandmarkSpec> landmarks, const PriorSpec& priors,
                        ModelVariant variant, const CovarianceParams& covariance, const SamplerOptions& options,
                        Rng& rng);

/// Copies the NHPP posterior means of rho into `landmarks`.
std::vector<LandmarkSpec> plug_in_rho(std::vector<LandmarkSpec> landmarks, const PosteriorChain& nhpp_chain);

/// Expected count per space-time cell for one draw, summed over weekday classes.
Eigen::VectorXd expected_counts(const Draw& draw, const SpaceTimeGrid& grid);

}  // namespace stcox
