#include "core/fit.hpp"

#include <cmath>

#include "core/error.hpp"

namespace gsa {

std::vector<double> apply_log1p(std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= -1.0)
      raise(ErrorKind::InvalidArgument, "log1p preprocessing requires x > -1");
    out[i] = std::log1p(xs[i]);
  }
  return out;
}

CalibratedModel fit(std::span<const double> sample, const FitOptions& opts) {
  std::vector<double> transformed;
  std::span<const double> xs = sample;
  if (opts.log1p_input) {
    transformed = apply_log1p(sample);
    xs = transformed;
  }

  BasisSpec basis = opts.basis ? *opts.basis : select_basis(xs);

  CalibrationOptions cal_opts;
  cal_opts.winsor_alpha = opts.winsor_alpha;
  cal_opts.solver = opts.solver;

  Rng mde_rng(substream_seed(opts.seed, 0x6d646573ULL));  // swap-mode reference draws

  if (opts.auto_order) {
    Rng sel_rng = mde_rng;
    OrderSelection sel =
        select_order(xs, basis.family, opts.order_max, opts.order_rel_gain, opts.mde, cal_opts,
                     &sel_rng);
    basis.order = sel.chosen;
  }

  CalibratedModel model = calibrate(xs, basis, opts.mde, cal_opts, &mde_rng);
  model.rule = opts.rule;
  model.log1p_input = opts.log1p_input;

  if (opts.rule == RuleKind::Srp && opts.threshold.kind != ThresholdKind::Arl0Bisect &&
      opts.threshold.kind != ThresholdKind::Simulation)
    raise(ErrorKind::InvalidArgument,
          "SRP compares R against H, which has no closed form; calibrate with the arl0 "
          "(or simulation) threshold");

  if (opts.threshold.kind == ThresholdKind::Simulation ||
      opts.threshold.kind == ThresholdKind::Arl0Bisect) {
    H0Source source = opts.h0_parametric ? H0Source::parametric(*opts.h0_parametric)
                                         : H0Source::bootstrap({xs.begin(), xs.end()});
    Rng thr_rng(substream_seed(opts.seed, 0x74687265ULL));
    apply_threshold(model, opts.threshold, &source, &thr_rng);
  } else {
    apply_threshold(model, opts.threshold);
  }
  return model;
}

}  // namespace gsa
