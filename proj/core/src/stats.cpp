#include "stcox/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stcox/errors.hpp"

namespace stcox {

double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InputError("quantile probability outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> x, double prob) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, prob);
}

Interval central_interval(std::span<const double> x, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("interval level must lie in (0, 1)");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(s, tail), quantile_sorted(s, 1.0 - tail)};
}

}  // namespace stcox
