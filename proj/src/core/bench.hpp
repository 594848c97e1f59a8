#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core/baselines.hpp"
#include "core/calibration.hpp"
#include "core/distributions.hpp"
#include "core/threshold.hpp"

namespace gsa {

struct GsaConfig {
  std::string name;
  std::optional<BasisSpec> basis;  // auto-selected per trial when unset
  MdeSpec mde = MdeSpec::mean_shift(0.5);
  double winsor_alpha = 0.10;
  RuleKind rule = RuleKind::Cusum;
  SolverOptions solver;
  std::optional<ThresholdSpec> threshold;  // falls back to the manifest threshold
};

struct BaselineConfig {
  std::string name;
  BaselineSpec params;
};

using DetectorConfig = std::variant<GsaConfig, BaselineConfig>;

struct ExperimentManifest {
  SeriesSpec series;  // per-trial template; its seed field is ignored
  std::vector<DetectorConfig> configs;
  ThresholdSpec threshold;
  std::size_t n_trials = 2000;
  std::size_t n_cal = 1000;
  std::uint64_t base_seed = 0;
  double ar1_rho = 0.0;  // AR(1) wrapping of calibration and test innovations
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct ConfigMetrics {
  std::string name;
  std::size_t n_trials = 0;
  std::size_t n_detected = 0;
  std::size_t n_false = 0;
  std::size_t n_missed = 0;
  std::size_t n_failed = 0;
  double far = 0.0;
  double det_rate = 0.0;
  std::optional<double> add_mean;
  std::optional<double> add_se;
  // config diagnostics, averaged over successful trials (GSA only)
  std::optional<double> j_s_mean;
  std::optional<double> eta_mean;  // reported as the rho estimate
  std::optional<double> cond_f_mean;
  std::vector<std::int64_t> alarms;  // per-trial 1-based alarm index, -1 = none, -2 = failed
};

struct MetricsReport {
  ExperimentManifest manifest;
  std::vector<ConfigMetrics> configs;
};

MetricsReport run_experiment(const ExperimentManifest& manifest);

// Variance-preserving AR(1) filter over an innovations series:
// y_1 = x_1, y_n = rho y_{n-1} + sqrt(1-rho^2) x_n.
std::vector<double> ar1_wrap(std::span<const double> xs, double rho);

struct OcPoint {
  std::string config;
  double arl0_target = 0.0;
  double arl0_achieved = 0.0;
  std::optional<double> add_mean;
  std::optional<double> add_se;
  std::size_t n_detected = 0;
  std::size_t n_trials = 0;
  bool failed = false;
  std::string error;
};

// ADD at matched ARL0: per config and grid point, bisect the threshold to the
// target ARL0, then measure delay on post-change streams (change at tau = 1).
std::vector<OcPoint> oc_curve(const ExperimentManifest& manifest,
                              const std::vector<double>& arl0_grid);

ExperimentManifest manifest_from_json(const nlohmann::json& j);
nlohmann::ordered_json manifest_to_json(const ExperimentManifest& m);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
std::string report_alarms_csv(const MetricsReport& report);
std::string oc_curve_csv(const std::vector<OcPoint>& points);

// Canned manifest reproducing the scenario-C desk experiment (poly s=1..4).
ExperimentManifest repro_manifest_table_4_2();

}  // namespace gsa
