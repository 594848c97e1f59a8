#include "core/distributions.hpp"

#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace gsa {

Distribution Distribution::gaussian(double mu, double sigma) {
  Distribution d;
  d.kind = DistKind::Gaussian;
  d.mu = mu;
  d.sigma = sigma;
  return d;
}

Distribution Distribution::pearson3(double skew) {
  Distribution d;
  d.kind = DistKind::PearsonIII;
  d.skew = skew;
  return d;
}

Distribution Distribution::student_t(double nu) {
  Distribution d;
  d.kind = DistKind::StudentT;
  d.nu = nu;
  return d;
}

Distribution Distribution::pareto(double shape) {
  Distribution d;
  d.kind = DistKind::Pareto;
  d.shape = shape;
  return d;
}

Distribution Distribution::lognormal(double sigma_log) {
  Distribution d;
  d.kind = DistKind::LogNormal;
  d.sigma_log = sigma_log;
  return d;
}

Distribution Distribution::mixture(std::vector<MixtureComponent> comps) {
  Distribution d;
  d.kind = DistKind::GaussianMixture;
  d.components = std::move(comps);
  return d;
}

void Distribution::validate() const {
  switch (kind) {
    case DistKind::Gaussian:
      if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
        raise(ErrorKind::InvalidArgument, "gaussian requires finite mu and sigma > 0");
      break;
    case DistKind::PearsonIII:
      if (!std::isfinite(skew)) raise(ErrorKind::InvalidArgument, "pearson3 skew must be finite");
      break;
    case DistKind::StudentT:
      if (!(nu > 0.0)) raise(ErrorKind::InvalidArgument, "student_t requires nu > 0");
      break;
    case DistKind::Pareto:
      if (!(shape > 0.0)) raise(ErrorKind::InvalidArgument, "pareto requires shape b > 0");
      break;
    case DistKind::LogNormal:
      if (!(sigma_log > 0.0)) raise(ErrorKind::InvalidArgument, "lognormal requires sigma_log > 0");
      break;
    case DistKind::GaussianMixture: {
      if (components.empty()) raise(ErrorKind::InvalidArgument, "mixture needs components");
      double wsum = 0.0;
      for (const auto& c : components) {
        if (!(c.weight > 0.0)) raise(ErrorKind::InvalidArgument, "mixture weights must be positive");
        if (!(c.sigma > 0.0)) raise(ErrorKind::InvalidArgument, "mixture sigmas must be positive");
        wsum += c.weight;
      }
      if (std::abs(wsum - 1.0) > 1e-12)
        raise(ErrorKind::InvalidArgument, "mixture weights must sum to 1");
      break;
    }
  }
}

double Distribution::stddev() const {
  switch (kind) {
    case DistKind::Gaussian:
      return sigma;
    case DistKind::PearsonIII:
      return 1.0;  // standardized by construction
    case DistKind::StudentT:
      if (nu <= 2.0)
        raise(ErrorKind::InvalidArgument, "student_t stddev undefined for nu <= 2");
      return std::sqrt(nu / (nu - 2.0));
    case DistKind::Pareto: {
      if (shape <= 2.0)
        raise(ErrorKind::InvalidArgument, "pareto stddev undefined for b <= 2");
      double b = shape;
      return std::sqrt(b / ((b - 1.0) * (b - 1.0) * (b - 2.0)));
    }
    case DistKind::LogNormal: {
      double s2 = sigma_log * sigma_log;
      return std::sqrt((std::exp(s2) - 1.0) * std::exp(s2));
    }
    case DistKind::GaussianMixture: {
      double m = 0.0, m2 = 0.0;
      for (const auto& c : components) {
        m += c.weight * c.mu;
        m2 += c.weight * (c.mu * c.mu + c.sigma * c.sigma);
      }
      return std::sqrt(m2 - m * m);
    }
  }
  raise(ErrorKind::InvalidArgument, "unknown distribution kind");
}

double gamma_draw(double shape, Rng& rng) {
  if (!(shape > 0.0)) raise(ErrorKind::InvalidArgument, "gamma shape must be positive");
  if (shape < 1.0) {
    // boost: Gamma(k) = Gamma(k+1) * U^{1/k}
    double u = rng.uniform();
    return gamma_draw(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Distribution::draw(Rng& rng) const {
  switch (kind) {
    case DistKind::Gaussian:
      return mu + sigma * rng.normal();
    case DistKind::PearsonIII: {
      // Standardized gamma: shape k = (2/skew)^2, (G - k)/sqrt(k) has mean 0,
      // variance 1, skewness `skew`. skew == 0 degenerates to N(0,1) and must
      // consume the stream identically to Gaussian(0,1).
      if (skew == 0.0) return rng.normal();
      double g3 = std::abs(skew);
      double k = 4.0 / (g3 * g3);
      double g = gamma_draw(k, rng);
      double z = (g - k) / std::sqrt(k);
      return skew > 0.0 ? z : -z;
    }
    case DistKind::StudentT: {
      double z = rng.normal();
      double chi2 = 2.0 * gamma_draw(nu / 2.0, rng);
      return z / std::sqrt(chi2 / nu);
    }
    case DistKind::Pareto:
      // support [1, inf), density b x^{-b-1}; inverse CDF
      return std::pow(rng.uniform(), -1.0 / shape);
    case DistKind::LogNormal:
      return std::exp(sigma_log * rng.normal());
    case DistKind::GaussianMixture: {
      double u = rng.uniform();
      double acc = 0.0;
      for (const auto& c : components) {
        acc += c.weight;
        if (u <= acc) return c.mu + c.sigma * rng.normal();
      }
      const auto& last = components.back();
      return last.mu + last.sigma * rng.normal();
    }
  }
  raise(ErrorKind::InvalidArgument, "unknown distribution kind");
}

void sample(const Distribution& dist, std::size_t n, Rng& rng, std::vector<double>& out) {
  if (n == 0) raise(ErrorKind::InvalidArgument, "sample size must be >= 1");
  dist.validate();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = dist.draw(rng);
}

std::vector<double> sample(const Distribution& dist, std::size_t n, Rng& rng) {
  std::vector<double> out;
  sample(dist, n, rng, out);
  return out;
}

Change Change::mean_shift(double delta) {
  Change c;
  c.kind = ChangeKind::MeanShift;
  c.delta = delta;
  return c;
}

Change Change::scale_shift(double factor) {
  Change c;
  c.kind = ChangeKind::ScaleShift;
  c.factor = factor;
  return c;
}

Change Change::swap(Distribution to) {
  Change c;
  c.kind = ChangeKind::DistributionSwap;
  c.to = std::move(to);
  return c;
}

void Change::validate() const {
  switch (kind) {
    case ChangeKind::MeanShift:
      if (!std::isfinite(delta)) raise(ErrorKind::InvalidArgument, "mean shift delta must be finite");
      break;
    case ChangeKind::ScaleShift:
      if (!(factor > 0.0)) raise(ErrorKind::InvalidArgument, "scale shift factor must be > 0");
      break;
    case ChangeKind::DistributionSwap:
      to.validate();
      break;
  }
}

void SeriesSpec::validate() const {
  h0.validate();
  change.validate();
  if (tau < 1 || tau > n_total)
    raise(ErrorKind::InvalidArgument, "series requires 0 < tau <= n_total");
  if (n_total == 0) raise(ErrorKind::InvalidArgument, "series length must be >= 1");
}

std::vector<double> generate_series(const SeriesSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> out(spec.n_total);
  double shift = 0.0;
  if (spec.change.kind == ChangeKind::MeanShift && spec.change.delta != 0.0)
    shift = spec.change.delta * spec.h0.stddev();
  for (std::size_t i = 0; i < spec.n_total; ++i) {
    bool post = (i + 1) >= spec.tau;
    switch (spec.change.kind) {
      case ChangeKind::MeanShift:
        out[i] = spec.h0.draw(rng) + (post ? shift : 0.0);
        break;
      case ChangeKind::ScaleShift:
        out[i] = spec.h0.draw(rng) * (post ? spec.change.factor : 1.0);
        break;
      case ChangeKind::DistributionSwap:
        out[i] = post ? spec.change.to.draw(rng) : spec.h0.draw(rng);
        break;
    }
  }
  return out;
}

std::vector<double> generate_series(const SeriesSpec& spec) {
  Rng rng(spec.seed);
  return generate_series(spec, rng);
}

}  // namespace gsa
