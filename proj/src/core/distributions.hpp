#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"

namespace gsa {

enum class DistKind { Gaussian, PearsonIII, StudentT, Pareto, LogNormal, GaussianMixture };

struct MixtureComponent {
  double weight = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

// One in-control / post-change law. Parameter slots are shared across kinds:
//   Gaussian(mu, sigma) | PearsonIII(skew) | StudentT(nu) | Pareto(shape) |
//   LogNormal(sigma_log) | GaussianMixture(components)
struct Distribution {
  DistKind kind = DistKind::Gaussian;
  double mu = 0.0;
  double sigma = 1.0;      // Gaussian
  double skew = 0.0;       // PearsonIII gamma_3
  double nu = 5.0;         // StudentT degrees of freedom
  double shape = 3.0;      // Pareto b
  double sigma_log = 0.5;  // LogNormal
  std::vector<MixtureComponent> components;

  static Distribution gaussian(double mu, double sigma);
  static Distribution pearson3(double skew);
  static Distribution student_t(double nu);
  static Distribution pareto(double shape);
  static Distribution lognormal(double sigma_log);
  static Distribution mixture(std::vector<MixtureComponent> comps);

  void validate() const;

  // Analytic standard deviation; throws if undefined (StudentT nu <= 2, Pareto b <= 2).
  double stddev() const;

  double draw(Rng& rng) const;
};

void sample(const Distribution& dist, std::size_t n, Rng& rng, std::vector<double>& out);
std::vector<double> sample(const Distribution& dist, std::size_t n, Rng& rng);

enum class ChangeKind { MeanShift, ScaleShift, DistributionSwap };

struct Change {
  ChangeKind kind = ChangeKind::MeanShift;
  double delta = 0.0;   // MeanShift, in units of the H0 standard deviation
  double factor = 1.0;  // ScaleShift
  Distribution to;      // DistributionSwap

  static Change mean_shift(double delta);
  static Change scale_shift(double factor);
  static Change swap(Distribution to);

  void validate() const;
};

struct SeriesSpec {
  Distribution h0;
  Change change;
  std::size_t tau = 200;  // 1-based index of the first post-change sample
  std::size_t n_total = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Samples 1..tau-1 from h0, samples tau..n_total from the changed law.
std::vector<double> generate_series(const SeriesSpec& spec);
std::vector<double> generate_series(const SeriesSpec& spec, Rng& rng);

// Gamma(shape, scale 1) variate, Marsaglia-Tsang.
double gamma_draw(double shape, Rng& rng);

}  // namespace gsa
