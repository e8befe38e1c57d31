#include "stcox/adaptation.hpp"

#include <cmath>

namespace stcox {

double adapt_scale(double scale, double accept_rate, double target, std::size_t iteration) {
  const double step = std::pow(static_cast<double>(std::max<std::size_t>(iteration, 1)), -0.6);
  return scale * std::exp(step * (accept_rate - target));
}

AdaptiveProposal::AdaptiveProposal(Eigen::VectorXd initial_sd, double target, std::size_t covariance_warmup)
    : initial_sd_(std::move(initial_sd)), target_(target), covariance_warmup_(covariance_warmup) {
  const auto d = initial_sd_.size();
  mean_ = Eigen::VectorXd::Zero(d);
  covariance_ = Eigen::MatrixXd::Zero(d, d);
  proposal_chol_ = initial_sd_.asDiagonal();
}

Eigen::VectorXd AdaptiveProposal::propose(const Eigen::VectorXd& current, Rng& rng) const {
  const Eigen::VectorXd eps = standard_normal_vector(current.size(), rng);
  return current + scale() * (proposal_chol_ * eps);
}

void AdaptiveProposal::update(double accept_probability, const Eigen::VectorXd& state) {
  if (frozen_) return;
  ++steps_;
  log_scale_ = std::log(adapt_scale(scale(), accept_probability, target_, steps_));

  // Running mean / covariance of the visited states, skipping the first half
  // of the warm-up as transient.
  if (covariance_warmup_ == 0 || 2 * steps_ <= covariance_warmup_) return;
  ++covariance_samples_;
  const double n = static_cast<double>(covariance_samples_);
  const Eigen::VectorXd diff = state - mean_;
  mean_ += diff / n;
  covariance_ += (diff * (state - mean_).transpose() - covariance_) / n;

  if (steps_ == covariance_warmup_) {
    empirical_ = true;
    // Optimal-scaling start for a Gaussian target.
    log_scale_ = std::log(2.38 / std::sqrt(static_cast<double>(dimension())));
    refresh_cholesky();
  } else if (empirical_ && steps_ % 50 == 0) {
    refresh_cholesky();
  }
}

void AdaptiveProposal::refresh_cholesky() {
  Eigen::MatrixXd c = covariance_;
  c.diagonal().array() += 1e-10 + 1e-6 * initial_sd_.array().square();
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) proposal_chol_ = llt.matrixL();
}

}  // namespace stcox
