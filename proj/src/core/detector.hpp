#pragma once

#include <optional>
#include <span>
#include <vector>

#include "core/calibration.hpp"

namespace gsa {

// lambda = k0 + K . phi(x) with clipped basis values.
double llr(const CalibratedModel& model, double x);

struct AlarmResult {
  std::optional<std::size_t> first_alarm;  // 1-based
  std::vector<double> lambdas;             // only when trajectory requested
  std::vector<double> stats;
};

// One monitored stream. The state freezes after an alarm; stepping further is
// a usage error and restarting requires reset().
class Detector {
public:
  explicit Detector(RuleKind rule, double threshold);

  // Feeds one lambda increment. Returns true exactly once, on first crossing.
  bool step(double lambda);

  void reset();

  RuleKind rule() const { return rule_; }
  double threshold() const { return threshold_; }
  std::size_t t() const { return t_; }
  std::optional<std::size_t> alarmed_at() const { return alarmed_at_; }

  // Running statistic g / S / R. SRP saturates to +inf once it leaves the
  // linear range; the log-domain value stays exact.
  double stat() const;
  double log_stat() const;  // SRP only: ln R (-inf at R = 0)

private:
  RuleKind rule_;
  double threshold_;
  double stat_ = 0.0;
  double log_r_ = -std::numeric_limits<double>::infinity();
  bool log_domain_ = false;
  std::size_t t_ = 0;
  std::optional<std::size_t> alarmed_at_;
};

// Batch wrapper: first 1-based crossing index over the series, O(1) state
// unless want_trajectory.
AlarmResult run(const CalibratedModel& model, std::span<const double> series,
                bool want_trajectory = false);

AlarmResult run_detector(Detector& det, const CalibratedModel& model,
                         std::span<const double> series, bool want_trajectory = false);

enum class BurninStage { ColdStart, Accumulating, Full };

// Two-stage hybrid burn-in: linear model until n_min, EWMA moment accumulation
// until the kurtosis estimate stabilizes at n >= n_full, then the full-order
// model takes over.
class BurninMonitor {
public:
  struct Options {
    double alpha = 0.05;       // EWMA smoothing
    std::size_t n_min = 50;
    std::size_t n_full = 500;
    double rel_se_gate = 0.1;  // switch when SE(kurtosis)/kurtosis < gate
  };

  BurninMonitor() : opts_() {}
  explicit BurninMonitor(Options opts) : opts_(opts) {}

  struct StepOutcome {
    BurninStage stage;
    bool use_full_model;
    double lambda;
    bool switched_now;
  };

  StepOutcome step(const CalibratedModel& linear, const CalibratedModel* full, double x);

  BurninStage stage() const { return stage_; }
  std::size_t n() const { return n_; }
  double ewma_m3() const { return m3_; }
  double ewma_m4() const { return m4_; }

private:
  Options opts_;
  BurninStage stage_ = BurninStage::ColdStart;
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace gsa
