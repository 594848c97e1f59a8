#include "core/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace gsa {

namespace {
constexpr double kLogFloor = 1e-12;

double clip(double v, double bound) { return std::clamp(v, -bound, bound); }
}  // namespace

BasisSpec BasisSpec::make(BasisFamily family, int order, double clip_bound) {
  BasisSpec b;
  b.family = family;
  b.order = order;
  b.clip_bound = clip_bound;
  b.validate();
  return b;
}

void BasisSpec::validate() const {
  if (order < 1 || order > kMaxOrder)
    raise(ErrorKind::InvalidArgument,
          "basis order must be in [1, " + std::to_string(kMaxOrder) + "]");
  if (!(clip_bound > 0.0)) raise(ErrorKind::InvalidArgument, "clip_bound must be > 0");
  if (family == BasisFamily::Frac && !frac_exponents.empty()) {
    if (frac_exponents.size() != static_cast<std::size_t>(order))
      raise(ErrorKind::InvalidArgument, "frac basis needs one exponent per order");
    double prev = 1.0;
    for (double a : frac_exponents) {
      if (!(a > 0.0 && a < 1.0 && a < prev))
        raise(ErrorKind::InvalidArgument,
              "frac exponents must be strictly decreasing within (0,1)");
      prev = a;
    }
  }
  if (family != BasisFamily::Frac && !frac_exponents.empty())
    raise(ErrorKind::InvalidArgument, "frac_exponents only apply to the frac family");
}

std::vector<double> BasisSpec::effective_exponents() const {
  if (!frac_exponents.empty()) return frac_exponents;
  std::vector<double> a(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) a[static_cast<std::size_t>(i)] = 1.0 / (i + 2.0);
  return a;
}

void eval_basis(const BasisSpec& spec, double x, std::span<double> out) {
  if (!std::isfinite(x)) raise(ErrorKind::Numeric, "basis input must be finite");
  const int s = spec.order;
  if (out.size() < static_cast<std::size_t>(s))
    raise(ErrorKind::InvalidArgument, "basis output buffer too small");
  const double b = spec.clip_bound;
  switch (spec.family) {
    case BasisFamily::Poly: {
      double p = 1.0;
      for (int i = 0; i < s; ++i) {
        p *= x;
        out[static_cast<std::size_t>(i)] = clip(p, b);
      }
      break;
    }
    case BasisFamily::Log: {
      double lx = std::log(std::max(std::abs(x), kLogFloor));
      double vals[4] = {x, lx, x * lx, lx * lx};
      for (int i = 0; i < s; ++i) out[static_cast<std::size_t>(i)] = clip(vals[i], b);
      break;
    }
    case BasisFamily::Frac: {
      auto alphas = spec.effective_exponents();
      double ax = std::abs(x);
      double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      for (int i = 0; i < s; ++i)
        out[static_cast<std::size_t>(i)] =
            clip(sgn * std::pow(ax, alphas[static_cast<std::size_t>(i)]), b);
      break;
    }
    case BasisFamily::Hermite: {
      // probabilists' He_n: He_{n+1} = x He_n - n He_{n-1}
      double hm1 = 1.0, h = x;
      for (int i = 0; i < s; ++i) {
        out[static_cast<std::size_t>(i)] = clip(h, b);
        double next = x * h - (i + 1) * hm1;
        hm1 = h;
        h = next;
      }
      break;
    }
  }
}

std::vector<double> eval_basis(const BasisSpec& spec, double x) {
  std::vector<double> out(static_cast<std::size_t>(spec.order));
  eval_basis(spec, x, out);
  return out;
}

double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 4) raise(ErrorKind::InvalidArgument, "kurtosis needs at least 4 samples");
  double m2 = central_moment(xs, 2);
  if (!(m2 > 0.0)) raise(ErrorKind::Degenerate, "kurtosis of a constant sample");
  double m4 = central_moment(xs, 4);
  return m4 / (m2 * m2) - 3.0;
}

double hill_estimator(std::span<const double> xs, std::size_t k) {
  if (k < 2) raise(ErrorKind::InvalidArgument, "hill estimator needs k >= 2");
  std::vector<double> pos;
  pos.reserve(xs.size());
  for (double x : xs) {
    double a = std::abs(x);
    if (a > 0.0) pos.push_back(a);
  }
  if (pos.size() < k + 1)
    raise(ErrorKind::Degenerate, "hill estimator needs at least k+1 positive values");
  std::sort(pos.begin(), pos.end());
  const std::size_t n = pos.size();
  const double ref = pos[n - k - 1];  // x_(n-k)
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(pos[n - 1 - i] / ref);
  acc /= static_cast<double>(k);
  if (!(acc > 0.0)) raise(ErrorKind::Degenerate, "hill estimator degenerate (no tail spread)");
  return 1.0 / acc;
}

BasisSpec select_basis(std::span<const double> xs) {
  if (xs.size() < 100)
    raise(ErrorKind::InvalidArgument, "basis selection needs at least 100 calibration samples");
  double g4 = excess_kurtosis(xs);
  auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(xs.size()))));
  double alpha = hill_estimator(xs, k);
  BasisFamily fam;
  if (alpha <= 4.0 || g4 >= 20.0)
    fam = BasisFamily::Log;
  else if (alpha <= 8.0 || g4 >= 6.0)
    fam = BasisFamily::Frac;
  else
    fam = BasisFamily::Poly;
  return BasisSpec::make(fam, 2);
}

}  // namespace gsa
