#include "core/detector.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gsa {

double llr(const CalibratedModel& model, double x) {
  if (!std::isfinite(x)) raise(ErrorKind::Numeric, "observation must be finite");
  double v = std::clamp(x, model.winsor_lo, model.winsor_hi);
  double phi[kMaxOrder];
  eval_basis(model.basis, v, std::span<double>(phi, static_cast<std::size_t>(model.order())));
  double acc = model.k0;
  for (int i = 0; i < model.order(); ++i) acc += model.k[static_cast<std::size_t>(i)] * phi[i];
  return acc;
}

Detector::Detector(RuleKind rule, double threshold) : rule_(rule), threshold_(threshold) {}

void Detector::reset() {
  stat_ = 0.0;
  log_r_ = -std::numeric_limits<double>::infinity();
  log_domain_ = false;
  t_ = 0;
  alarmed_at_.reset();
}

double Detector::stat() const {
  if (rule_ == RuleKind::Srp && log_domain_) return std::exp(log_r_);  // +inf when huge
  return stat_;
}

double Detector::log_stat() const {
  if (rule_ != RuleKind::Srp) raise(ErrorKind::State, "log_stat is defined for SRP only");
  if (log_domain_) return log_r_;
  return stat_ > 0.0 ? std::log(stat_) : -std::numeric_limits<double>::infinity();
}

bool Detector::step(double lambda) {
  if (alarmed_at_) raise(ErrorKind::State, "detector already alarmed; reset() before reuse");
  if (!std::isfinite(lambda)) raise(ErrorKind::Numeric, "lambda must be finite");
  ++t_;
  bool alarm = false;
  switch (rule_) {
    case RuleKind::Cusum:
      stat_ = std::max(0.0, stat_ + lambda);
      alarm = stat_ > threshold_;
      break;
    case RuleKind::Grsh:
      stat_ += lambda;
      alarm = stat_ > threshold_;
      break;
    case RuleKind::Srp: {
      // R = (1 + R) exp(lambda); switch to log domain before overflow.
      if (!log_domain_) {
        if (stat_ > 1e300 || lambda > 600.0) {
          log_domain_ = true;
          log_r_ = stat_ > 0.0 ? std::log(stat_) : -std::numeric_limits<double>::infinity();
        } else {
          stat_ = (1.0 + stat_) * std::exp(lambda);
          if (!std::isfinite(stat_)) {
            log_domain_ = true;
            log_r_ = std::log(1e300);
          }
        }
      }
      if (log_domain_) {
        // log(1 + e^lr) + lambda, stable for large lr
        double lr = log_r_;
        double l1p = lr > 0.0 ? lr + std::log1p(std::exp(-lr)) : std::log1p(std::exp(lr));
        log_r_ = l1p + lambda;
        alarm = threshold_ > 0.0 ? log_r_ > std::log(threshold_) : true;
      } else {
        alarm = stat_ > threshold_;
      }
      break;
    }
  }
  if (alarm) alarmed_at_ = t_;
  return alarm;
}

AlarmResult run_detector(Detector& det, const CalibratedModel& model,
                         std::span<const double> series, bool want_trajectory) {
  if (series.empty()) raise(ErrorKind::InvalidArgument, "series must be non-empty");
  AlarmResult res;
  if (want_trajectory) {
    res.lambdas.reserve(series.size());
    res.stats.reserve(series.size());
  }
  for (double x : series) {
    double lam = llr(model, x);
    bool alarm = det.step(lam);
    if (want_trajectory) {
      res.lambdas.push_back(lam);
      res.stats.push_back(det.stat());
    }
    if (alarm) {
      res.first_alarm = det.t();
      break;
    }
  }
  return res;
}

AlarmResult run(const CalibratedModel& model, std::span<const double> series,
                bool want_trajectory) {
  if (std::isnan(model.threshold))
    raise(ErrorKind::InvalidArgument, "model has no threshold; apply a threshold rule first");
  Detector det(model.rule, model.threshold);
  return run_detector(det, model, series, want_trajectory);
}

BurninMonitor::StepOutcome BurninMonitor::step(const CalibratedModel& linear,
                                               const CalibratedModel* full, double x) {
  if (!std::isfinite(x)) raise(ErrorKind::Numeric, "observation must be finite");
  ++n_;
  if (n_ == 1) {
    mean_ = x;
  } else {
    double d = x - mean_;
    m2_ = opts_.alpha * d * d + (1.0 - opts_.alpha) * m2_;
    m3_ = opts_.alpha * d * d * d + (1.0 - opts_.alpha) * m3_;
    m4_ = opts_.alpha * d * d * d * d + (1.0 - opts_.alpha) * m4_;
    mean_ = opts_.alpha * x + (1.0 - opts_.alpha) * mean_;
  }

  bool switched = false;
  if (stage_ == BurninStage::ColdStart && n_ >= opts_.n_min) stage_ = BurninStage::Accumulating;
  if (stage_ == BurninStage::Accumulating && full && n_ >= opts_.n_full && m2_ > 0.0) {
    // Relative SE of the kurtosis proper (m4/m2^2): sqrt(24/n) against the
    // running estimate. Zero-variance streams never switch.
    double kurt = m4_ / (m2_ * m2_);
    double se = std::sqrt(24.0 / static_cast<double>(n_));
    if (kurt > 0.0 && se / kurt < opts_.rel_se_gate) {
      stage_ = BurninStage::Full;
      switched = true;
    }
  }

  bool use_full = stage_ == BurninStage::Full && full != nullptr;
  double lam = use_full ? llr(*full, x) : llr(linear, x);
  return {stage_, use_full, lam, switched};
}

}  // namespace gsa
