#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gsa {

double mean(std::span<const double> xs) {
  if (xs.empty()) raise(ErrorKind::InvalidArgument, "mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

double central_moment(std::span<const double> xs, int k) {
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += std::pow(x - m, k);
  return s / static_cast<double>(xs.size());
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) raise(ErrorKind::InvalidArgument, "percentile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double percentile(std::span<const double> xs, double p) {
  auto s = sorted_copy(xs);
  return percentile_sorted(s, p);
}

double median(std::span<const double> xs) { return percentile(xs, 0.5); }

double mad(std::span<const double> xs) {
  double med = median(xs);
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::abs(xs[i] - med);
  return median(dev);
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace gsa
