#pragma once

#include <span>
#include <vector>

namespace stcox {

double mean(std::span<const double> x);
/// Unbiased sample variance; NaN for fewer than two values.
double variance(std::span<const double> x);

/// Linear-interpolation sample quantile (R type 7) of unsorted data.
double quantile(std::span<const double> x, double prob);
/// Same on data already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v) const { return v >= lower && v <= upper; }
};

/// Equal-tailed central interval at the given nominal level.
Interval central_interval(std::span<const double> x, double level);

/// One-sample Kolmogorov-Smirnov distance against a CDF.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf);

}  // namespace stcox

#include <algorithm>

namespace stcox {

template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace stcox
