#pragma once

#include <functional>
#include <vector>

#include "core/calibration.hpp"
#include "core/distributions.hpp"

namespace gsa {

double pe_threshold(double e0, double var0, double eps);

// Vysochanskii-Petunin refinement, valid for eps <= 1/6.
double vp_threshold(double e0, double var0, double eps);

double cantelli_threshold(double e0, double var0, double eps);

// PE with the AR(1) effective variance var0 (1+rho)/(1-rho).
double ar1_corrected_pe(double e0, double var0, double rho, double eps);

// H0 sample source for simulation-based calibration: bootstrap resampling of
// a calibration sample, or parametric draws for synthetic studies.
class H0Source {
public:
  static H0Source bootstrap(std::vector<double> sample);
  static H0Source parametric(Distribution dist);

  double draw(Rng& rng) const;

private:
  bool parametric_ = false;
  Distribution dist_;
  std::vector<double> sample_;
};

struct McThresholdOptions {
  double eps = 0.02;
  std::size_t blocks = 50;        // M
  std::size_t block_length = 500; // B
};

// (1-eps)-quantile of per-block maxima of the model's stopping statistic
// under H0. Deterministic given the rng seed.
double mc_threshold(const CalibratedModel& model, const H0Source& source,
                    const McThresholdOptions& opts, Rng rng);

struct Arl0Options {
  double target = 200.0;
  std::size_t runs = 200;  // MC runs per bisection evaluation
  int max_iter = 12;
  double tol = 0.05;           // relative ARL tolerance
  double cap_multiple = 10.0;  // censor runs at cap_multiple * target
};

struct Arl0Result {
  double h = 0.0;
  double achieved = 0.0;
  int evaluations = 0;
  std::vector<std::pair<double, double>> trace;  // (h, arl-hat)
};

// Generic bisection over a monotone ARL(h) evaluator.
Arl0Result arl0_bisect_fn(const std::function<double(double)>& arl_of_h, double h_lo, double h_hi,
                          const Arl0Options& opts);

// MC-backed bisection for a calibrated model; bracket [0, 4 h_PE] for the
// additive rules and [1, exp(h_PE)] for SRP, with h_PE taken at eps = 1/target.
Arl0Result arl0_bisect(const CalibratedModel& model, const H0Source& source,
                       const Arl0Options& opts, Rng rng);

// Mean alarm time of the model over `runs` pure-H0 streams, censored at `cap`.
double estimate_arl0(const CalibratedModel& model, double h, const H0Source& source,
                     std::size_t runs, std::size_t cap, Rng& rng);

// Full threshold rule description as it appears in manifests and models.
struct ThresholdSpec {
  ThresholdKind kind = ThresholdKind::Pe;
  double epsilon = 0.01;
  double scale = 1.0;  // s_h, multiplies the final threshold
  std::optional<double> ar1_rho;
  McThresholdOptions sim;
  Arl0Options arl0;

  void validate() const;
};

// Computes and stores model.threshold / model.threshold_kind. Simulation and
// ARL0 rules need an H0 source and a seed stream.
void apply_threshold(CalibratedModel& model, const ThresholdSpec& spec,
                     const H0Source* source = nullptr, Rng* rng = nullptr);

}  // namespace gsa
