#include "core/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/detector.hpp"
#include "core/error.hpp"
#include "core/stats.hpp"

namespace gsa {

namespace {
void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    raise(ErrorKind::InvalidArgument, "epsilon must lie in (0,1)");
}
void check_var(double var0) {
  if (!(var0 > 0.0)) raise(ErrorKind::InvalidArgument, "var0 must be positive");
}
}  // namespace

double pe_threshold(double e0, double var0, double eps) {
  check_var(var0);
  check_eps(eps);
  return e0 + std::sqrt(var0 / eps);
}

double vp_threshold(double e0, double var0, double eps) {
  check_var(var0);
  check_eps(eps);
  if (eps > 1.0 / 6.0)
    raise(ErrorKind::InvalidArgument,
          "VP bound requires eps <= 1/6 (Vysochanskii-Petunin validity condition)");
  return e0 + (2.0 / 3.0) * std::sqrt(var0 / eps);
}

double cantelli_threshold(double e0, double var0, double eps) {
  check_var(var0);
  check_eps(eps);
  return e0 + std::sqrt(var0) * std::sqrt(1.0 / eps - 1.0);
}

double ar1_corrected_pe(double e0, double var0, double rho, double eps) {
  if (!(std::abs(rho) < 1.0)) raise(ErrorKind::InvalidArgument, "AR(1) rho must satisfy |rho| < 1");
  double var_eff = var0 * (1.0 + rho) / (1.0 - rho);
  return pe_threshold(e0, var_eff, eps);
}

H0Source H0Source::bootstrap(std::vector<double> sample) {
  if (sample.empty()) raise(ErrorKind::InvalidArgument, "bootstrap source needs a sample");
  H0Source s;
  s.parametric_ = false;
  s.sample_ = std::move(sample);
  return s;
}

H0Source H0Source::parametric(Distribution dist) {
  dist.validate();
  H0Source s;
  s.parametric_ = true;
  s.dist_ = std::move(dist);
  return s;
}

double H0Source::draw(Rng& rng) const {
  if (parametric_) return dist_.draw(rng);
  auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(sample_.size()));
  if (idx >= sample_.size()) idx = sample_.size() - 1;
  return sample_[idx];
}

double mc_threshold(const CalibratedModel& model, const H0Source& source,
                    const McThresholdOptions& opts, Rng rng) {
  if (opts.blocks < 20) raise(ErrorKind::InvalidArgument, "mc threshold needs M >= 20 blocks");
  if (opts.block_length < 100)
    raise(ErrorKind::InvalidArgument, "mc threshold needs block length B >= 100");
  if (!(opts.eps > 0.0 && opts.eps <= 1.0))
    raise(ErrorKind::InvalidArgument, "epsilon must lie in (0,1]");

  std::vector<double> maxima(opts.blocks);
  const double never = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < opts.blocks; ++m) {
    Rng block_rng = rng.fork(m);
    Detector det(model.rule, never);
    double peak = 0.0;
    for (std::size_t t = 0; t < opts.block_length; ++t) {
      det.step(llr(model, source.draw(block_rng)));
      peak = std::max(peak, det.stat());
    }
    maxima[m] = peak;
  }
  std::sort(maxima.begin(), maxima.end());
  return percentile_sorted(maxima, 1.0 - opts.eps);
}

double estimate_arl0(const CalibratedModel& model, double h, const H0Source& source,
                     std::size_t runs, std::size_t cap, Rng& rng) {
  double total = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng run_rng = rng.fork(r);
    Detector det(model.rule, h);
    std::size_t t = cap;
    for (std::size_t i = 0; i < cap; ++i) {
      if (det.step(llr(model, source.draw(run_rng)))) {
        t = i + 1;
        break;
      }
    }
    total += static_cast<double>(t);  // censored runs count at the cap
  }
  return total / static_cast<double>(runs);
}

Arl0Result arl0_bisect_fn(const std::function<double(double)>& arl_of_h, double h_lo, double h_hi,
                          const Arl0Options& opts) {
  if (!(opts.target >= 20.0)) raise(ErrorKind::InvalidArgument, "target ARL0 must be >= 20");
  if (!(h_hi > h_lo)) raise(ErrorKind::InvalidArgument, "bisection bracket is empty");

  Arl0Result res;
  auto eval = [&](double h) {
    double a = arl_of_h(h);
    ++res.evaluations;
    res.trace.emplace_back(h, a);
    return a;
  };

  double arl_lo = eval(h_lo);
  double arl_hi = eval(h_hi);
  if (arl_lo > opts.target || arl_hi < opts.target) {
    std::string t;
    for (auto& [h, a] : res.trace) t += " (" + std::to_string(h) + ", " + std::to_string(a) + ")";
    raise(ErrorKind::Calibration, "ARL0 bisection bracket does not contain the target;" + t);
  }

  double lo = h_lo, hi = h_hi;
  double mid = 0.5 * (lo + hi);
  double achieved = arl_lo;
  for (int it = 0; it < opts.max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    achieved = eval(mid);
    if (std::abs(achieved - opts.target) / opts.target < opts.tol) break;
    if (achieved > opts.target)
      hi = mid;
    else
      lo = mid;
  }
  res.h = mid;
  res.achieved = achieved;
  return res;
}

Arl0Result arl0_bisect(const CalibratedModel& model, const H0Source& source,
                       const Arl0Options& opts, Rng rng) {
  if (opts.runs < 1) raise(ErrorKind::InvalidArgument, "arl0 bisection needs runs >= 1");
  auto cap = static_cast<std::size_t>(std::ceil(opts.cap_multiple * opts.target));
  double h_pe = pe_threshold(model.e0, model.var0, 1.0 / opts.target);

  double lo, hi;
  if (model.rule == RuleKind::Srp) {
    lo = 1.0;
    hi = std::exp(std::min(h_pe, 700.0));
  } else {
    lo = 0.0;
    hi = std::max(4.0 * h_pe, 1e-6);
  }

  std::uint64_t eval_tag = 0;
  auto arl_of_h = [&](double h) {
    Rng eval_rng = rng.fork(eval_tag++);
    return estimate_arl0(model, h, source, opts.runs, cap, eval_rng);
  };
  return arl0_bisect_fn(arl_of_h, lo, hi, opts);
}

void ThresholdSpec::validate() const {
  if (kind != ThresholdKind::Arl0Bisect) check_eps(epsilon);
  if (!(scale > 0.0)) raise(ErrorKind::InvalidArgument, "threshold scale must be > 0");
  if (ar1_rho && kind != ThresholdKind::Pe)
    raise(ErrorKind::InvalidArgument, "AR(1) correction is defined for the PE rule only");
}

void apply_threshold(CalibratedModel& model, const ThresholdSpec& spec, const H0Source* source,
                     Rng* rng) {
  spec.validate();
  double h = 0.0;
  switch (spec.kind) {
    case ThresholdKind::Pe:
      h = spec.ar1_rho ? ar1_corrected_pe(model.e0, model.var0, *spec.ar1_rho, spec.epsilon)
                       : pe_threshold(model.e0, model.var0, spec.epsilon);
      break;
    case ThresholdKind::Vp:
      h = vp_threshold(model.e0, model.var0, spec.epsilon);
      break;
    case ThresholdKind::Cantelli:
      h = cantelli_threshold(model.e0, model.var0, spec.epsilon);
      break;
    case ThresholdKind::Simulation: {
      if (!source || !rng)
        raise(ErrorKind::InvalidArgument, "simulation threshold needs an H0 source and a seed");
      McThresholdOptions mc = spec.sim;
      mc.eps = spec.epsilon;
      h = mc_threshold(model, *source, mc, *rng);
      break;
    }
    case ThresholdKind::Arl0Bisect: {
      if (!source || !rng)
        raise(ErrorKind::InvalidArgument, "ARL0 calibration needs an H0 source and a seed");
      h = arl0_bisect(model, *source, spec.arl0, *rng).h;
      break;
    }
  }
  model.threshold = spec.scale * h;
  model.threshold_kind = spec.kind;
}

}  // namespace gsa
