#include "stcox/gp.hpp"

#include <cmath>
#include <optional>

#include "stcox/errors.hpp"

namespace stcox {

namespace {

std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.allFinite() || (l.diagonal().array() <= 0.0).any()) return std::nullopt;
  return l;
}

// Cholesky with jitter escalation: first `start`, then 1e-8 x 10^k up to
// kMaxJitter, each relative to `scale`.
std::pair<Eigen::MatrixXd, double> factor_with_jitter(Eigen::MatrixXd a, double start, double scale) {
  double jitter = start;
  while (true) {
    Eigen::MatrixXd trial = a;
    trial.diagonal().array() += jitter * scale;
    if (auto l = try_cholesky(trial)) return {std::move(*l), jitter};
    if (jitter >= kMaxJitter * (1.0 - 1e-9)) break;
    jitter = jitter == 0.0 ? kInitialJitter : jitter * 10.0;
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation");
}

double log_det_from_lower(const Eigen::MatrixXd& l) { return 2.0 * l.diagonal().array().log().sum(); }

}  // namespace

CovFactor::CovFactor(Kronecker k, double jitter) : repr_(std::move(k)), jitter_(jitter) {}
CovFactor::CovFactor(Dense d, double jitter) : repr_(std::move(d)), jitter_(jitter) {}

std::size_t CovFactor::n_spatial() const {
  return is_kronecker() ? static_cast<std::size_t>(kronecker().spatial.rows()) : dense().n_spatial;
}

std::size_t CovFactor::n_time() const {
  return is_kronecker() ? static_cast<std::size_t>(kronecker().temporal.rows()) : dense().n_time;
}

Eigen::VectorXd CovFactor::apply(const Eigen::VectorXd& nu) const {
  if (static_cast<std::size_t>(nu.size()) != size()) throw InputError("whitened vector has wrong length");
  if (const auto* d = std::get_if<Dense>(&repr_)) {
    return d->lower.triangularView<Eigen::Lower>() * nu;
  }
  const auto& k = kronecker();
  const auto m = k.temporal.rows();
  const auto n = k.spatial.rows();
  Eigen::Map<const Eigen::MatrixXd> v(nu.data(), m, n);
  const Eigen::MatrixXd lt_v = k.temporal.triangularView<Eigen::Lower>() * v;
  // (L_t V) L_s^T computed as (L_s (L_t V)^T)^T.
  const Eigen::MatrixXd ls_vt = k.spatial.triangularView<Eigen::Lower>() * lt_v.transpose();
  Eigen::VectorXd z(nu.size());
  Eigen::Map<Eigen::MatrixXd>(z.data(), m, n) = k.sigma * ls_vt.transpose();
  return z;
}

Eigen::VectorXd CovFactor::whiten(const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != size()) throw InputError("field vector has wrong length");
  if (const auto* d = std::get_if<Dense>(&repr_)) {
    return d->lower.triangularView<Eigen::Lower>().solve(z);
  }
  const auto& k = kronecker();
  const auto m = k.temporal.rows();
  const auto n = k.spatial.rows();
  Eigen::Map<const Eigen::MatrixXd> zm(z.data(), m, n);
  const Eigen::MatrixXd a = k.temporal.triangularView<Eigen::Lower>().solve(zm);
  const Eigen::MatrixXd b = k.spatial.triangularView<Eigen::Lower>().solve(a.transpose());
  Eigen::VectorXd nu(z.size());
  Eigen::Map<Eigen::MatrixXd>(nu.data(), m, n) = b.transpose() / k.sigma;
  return nu;
}

double CovFactor::log_determinant() const {
  if (const auto* d = std::get_if<Dense>(&repr_)) return log_det_from_lower(d->lower);
  const auto& k = kronecker();
  const auto n = static_cast<double>(k.spatial.rows());
  const auto m = static_cast<double>(k.temporal.rows());
  return m * log_det_from_lower(k.spatial) + n * log_det_from_lower(k.temporal) +
         n * m * std::log(k.sigma * k.sigma);
}

Eigen::MatrixXd CovFactor::lower() const {
  if (const auto* d = std::get_if<Dense>(&repr_)) return d->lower;
  const auto& k = kronecker();
  return k.sigma * kronecker_product(k.spatial, k.temporal);
}

Eigen::MatrixXd CovFactor::covariance() const {
  const Eigen::MatrixXd l = lower();
  return l * l.transpose();
}

CovarianceStructure::CovarianceStructure(std::span<const PlanarPoint> sites, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  const auto m = static_cast<Eigen::Index>(times.size());
  if (n == 0 || m == 0) throw InputError("covariance structure needs at least one site and one time");
  spatial_distance_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& a = sites[static_cast<std::size_t>(i)];
      const auto& b = sites[static_cast<std::size_t>(j)];
      spatial_distance_(i, j) = spatial_distance_(j, i) =
          std::hypot(a.easting - b.easting, a.northing - b.northing);
    }
  }
  temporal_distance_.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      temporal_distance_(i, j) = temporal_distance_(j, i) =
          circular_distance(times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
    }
  }
}

namespace {

std::vector<PlanarPoint> grid_sites(const SpaceTimeGrid& grid) {
  std::vector<PlanarPoint> out;
  out.reserve(grid.n_spatial());
  for (const auto& c : grid.spatial_cells()) out.push_back(c.centroid);
  return out;
}

std::vector<double> grid_times(const SpaceTimeGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.n_time());
  for (const auto& c : grid.time_cells()) out.push_back(c.centroid);
  return out;
}

}  // namespace

CovarianceStructure::CovarianceStructure(const SpaceTimeGrid& grid)
    : CovarianceStructure(grid_sites(grid), grid_times(grid)) {}

Eigen::MatrixXd CovarianceStructure::spatial_correlation(const CovarianceParams& p) const {
  return (-p.phi_s * spatial_distance_.array()).exp().matrix();
}

Eigen::MatrixXd CovarianceStructure::temporal_correlation(const CovarianceParams& p) const {
  const double exponent = -p.cauchy_shape / p.alpha;
  return temporal_distance_.unaryExpr([&](double u) {
    return std::pow(1.0 + std::pow(p.phi_t * u, p.alpha), exponent);
  });
}

Eigen::MatrixXd CovarianceStructure::dense_covariance(const CovarianceParams& p, CovarianceModel model) const {
  p.validate();
  const auto n = spatial_distance_.rows();
  const auto m = temporal_distance_.rows();
  Eigen::MatrixXd c(n * m, n * m);
  if (model == CovarianceModel::Separable) {
    c = p.sigma2 * kronecker_product(spatial_correlation(p), temporal_correlation(p));
    return c;
  }
  // Per time pair: amplitude sigma2 psi^-(delta+gamma) and spatial rate phi_s psi^(-gamma/2).
  const double half_d = 0.5 * CovarianceParams::kSpatialDimension;
  Eigen::MatrixXd amplitude(m, m);
  Eigen::MatrixXd rate(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double psi = 1.0 + std::pow(p.phi_t * temporal_distance_(a, b), p.alpha);
      amplitude(a, b) = p.sigma2 * std::pow(psi, -(p.cauchy_shape + p.gamma * half_d));
      rate(a, b) = p.phi_s * std::pow(psi, -0.5 * p.gamma);
    }
  }
  for (Eigen::Index s1 = 0; s1 < n; ++s1) {
    for (Eigen::Index s2 = 0; s2 < n; ++s2) {
      const double h = spatial_distance_(s1, s2);
      c.block(s1 * m, s2 * m, m, m) = amplitude.array() * (-rate.array() * h).exp();
    }
  }
  return c;
}

CovFactor CovarianceStructure::factor(const CovarianceParams& p, CovarianceModel model) const {
  p.validate();
  if (model == CovarianceModel::Separable) {
    auto [ls, js] = factor_with_jitter(spatial_correlation(p), 0.0, 1.0);
    auto [lt, jt] = factor_with_jitter(temporal_correlation(p), 0.0, 1.0);
    return CovFactor(CovFactor::Kronecker{std::move(ls), std::move(lt), std::sqrt(p.sigma2)}, std::max(js, jt));
  }
  auto [l, j] = factor_with_jitter(dense_covariance(p, model), kInitialJitter, p.sigma2);
  return CovFactor(CovFactor::Dense{std::move(l), n_spatial(), n_time()}, j);
}

CovFactor assemble_factor(const SpaceTimeGrid& grid, const CovarianceParams& p, CovarianceModel model) {
  return CovarianceStructure(grid).factor(p, model);
}

Eigen::VectorXd transform(const CovFactor& factor, const Eigen::VectorXd& nu) { return factor.apply(nu); }

WhitenedField sample_prior_field(const CovFactor& factor, Rng& rng) {
  WhitenedField f;
  f.nu = standard_normal_vector(static_cast<Eigen::Index>(factor.size()), rng);
  f.z = factor.apply(f.nu);
  return f;
}

Eigen::MatrixXd kronecker_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace stcox
