#pragma once

// Gaussian-process field machinery on the space x circular-time grid.
//
// Field vectors use the grid's flat cell order (time fastest), so for the
// separable kernel the covariance is sigma^2 * kron(C_s, C_t) and
// kron(L_s, L_t) vec(V) = vec(L_t V L_s^T) with V the M x N reshaping.

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stcox/covariance.hpp"
#include "stcox/geomtime.hpp"
#include "stcox/random.hpp"

namespace stcox {

class CovFactor {
 public:
  struct Kronecker {
    Eigen::MatrixXd spatial;   // lower Cholesky of the N x N spatial correlation
    Eigen::MatrixXd temporal;  // lower Cholesky of the M x M temporal correlation
    double sigma = 1.0;
  };
  struct Dense {
    Eigen::MatrixXd lower;  // lower Cholesky of the full NM x NM covariance
    std::size_t n_spatial = 0;
    std::size_t n_time = 0;
  };

  CovFactor(Kronecker k, double jitter);
  CovFactor(Dense d, double jitter);

  bool is_kronecker() const { return std::holds_alternative<Kronecker>(repr_); }
  const Kronecker& kronecker() const { return std::get<Kronecker>(repr_); }
  const Dense& dense() const { return std::get<Dense>(repr_); }

  std::size_t n_spatial() const;
  std::size_t n_time() const;
  std::size_t size() const { return n_spatial() * n_time(); }

  // Diagonal jitter that was needed for the factorization to succeed.
  // Kronecker factors carry it relative to each correlation matrix, dense
  // factors relative to sigma^2.
  double jitter() const { return jitter_; }

  /// Z = L nu.
  Eigen::VectorXd apply(const Eigen::VectorXd& nu) const;
  /// nu = L^{-1} z.
  Eigen::VectorXd whiten(const Eigen::VectorXd& z) const;
  double log_determinant() const;
  /// L L^T formed densely; for tests and small grids only.
  Eigen::MatrixXd covariance() const;
  /// L formed densely; for tests and small grids only.
  Eigen::MatrixXd lower() const;

 private:
  std::variant<Kronecker, Dense> repr_;
  double jitter_ = 0.0;
};

/// Pairwise spatial and circular distances of a grid, cached so repeated
/// factorizations during sampling only pay for kernel evaluation.
class CovarianceStructure {
 public:
  CovarianceStructure(std::span<const PlanarPoint> sites, std::span<const double> times);
  explicit CovarianceStructure(const SpaceTimeGrid& grid);

  std::size_t n_spatial() const { return static_cast<std::size_t>(spatial_distance_.rows()); }
  std::size_t n_time() const { return static_cast<std::size_t>(temporal_distance_.rows()); }

  Eigen::MatrixXd spatial_correlation(const CovarianceParams& p) const;
  Eigen::MatrixXd temporal_correlation(const CovarianceParams& p) const;
  /// Full NM x NM covariance in flat cell order, without jitter.
  Eigen::MatrixXd dense_covariance(const CovarianceParams& p, CovarianceModel model) const;

  CovFactor factor(const CovarianceParams& p, CovarianceModel model) const;

 private:
  Eigen::MatrixXd spatial_distance_;
  Eigen::MatrixXd temporal_distance_;
};

inline constexpr double kInitialJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-5;

/// Separable kernels factor as a Kronecker pair, nonseparable ones densely.
/// Throws NumericalError when factorization fails even at the largest jitter.
CovFactor assemble_factor(const SpaceTimeGrid& grid, const CovarianceParams& p, CovarianceModel model);

Eigen::VectorXd transform(const CovFactor& factor, const Eigen::VectorXd& nu);

struct WhitenedField {
  Eigen::VectorXd nu;
  Eigen::VectorXd z;
};

WhitenedField sample_prior_field(const CovFactor& factor, Rng& rng);

/// Dense Kronecker product; oracle helper.
Eigen::MatrixXd kronecker_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace stcox
