#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "stcox/random.hpp"

namespace stcox {

inline constexpr double kTargetAcceptMultivariate = 0.234;
inline constexpr double kTargetAcceptScalar = 0.44;

/// Robbins-Monro step on the log proposal scale:
///   log s += i^-0.6 (accept_rate - target).
double adapt_scale(double scale, double accept_rate, double target, std::size_t iteration);

/// Random-walk proposal with an adaptively tuned global scale and, after a
/// warm-up, an empirical covariance of the visited states.  Frozen proposals
/// no longer change, which keeps the post-burn-in chain Markov.
class AdaptiveProposal {
 public:
  AdaptiveProposal() = default;
  AdaptiveProposal(Eigen::VectorXd initial_sd, double target, std::size_t covariance_warmup = 0);

  std::size_t dimension() const { return static_cast<std::size_t>(initial_sd_.size()); }
  double scale() const { return std::exp(log_scale_); }
  double target() const { return target_; }
  bool frozen() const { return frozen_; }
  bool using_empirical_covariance() const { return empirical_; }

  Eigen::VectorXd propose(const Eigen::VectorXd& current, Rng& rng) const;

  /// Feed the acceptance probability of the last proposal and the state after
  /// the accept/reject decision.
  void update(double accept_probability, const Eigen::VectorXd& state);
  void freeze() { frozen_ = true; }
  void set_scale(double s) { log_scale_ = std::log(s); }

 private:
  void refresh_cholesky();

  Eigen::VectorXd initial_sd_;
  double target_ = kTargetAcceptMultivariate;
  double log_scale_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t covariance_warmup_ = 0;
  std::size_t covariance_samples_ = 0;
  bool frozen_ = false;
  bool empirical_ = false;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd proposal_chol_;
};

}  // namespace stcox
