#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/calibration.hpp"
#include "core/threshold.hpp"

namespace gsa {

// End-to-end Phase 1: optional log1p transform, basis auto-selection, optional
// order selection, moment calibration, threshold rule.
struct FitOptions {
  std::optional<BasisSpec> basis;  // auto-selected when unset
  bool auto_order = false;         // J(s)-gain order selection up to order_max
  int order_max = 4;
  double order_rel_gain = 0.05;
  MdeSpec mde = MdeSpec::mean_shift(0.5);
  double winsor_alpha = 0.10;
  SolverOptions solver;
  ThresholdSpec threshold;
  RuleKind rule = RuleKind::Cusum;
  bool log1p_input = false;
  std::uint64_t seed = 0;  // simulation / ARL0 threshold calibration
  // H0 source for simulation thresholds; bootstrap of the calibration sample
  // when unset.
  std::optional<Distribution> h0_parametric;
};

CalibratedModel fit(std::span<const double> sample, const FitOptions& opts);

// ln(1+x); errors on x <= -1.
std::vector<double> apply_log1p(std::span<const double> xs);

}  // namespace gsa
