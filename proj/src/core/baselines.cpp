#include "core/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace gsa {

namespace {
constexpr double kMadToSigma = 1.4826;  // normal-consistency factor
}

BaselineSpec calibrate_baseline(BaselineKind kind, std::span<const double> sample,
                                const BaselineSpec& params) {
  if (sample.size() < 30)
    raise(ErrorKind::Calibration, "baseline calibration needs at least 30 samples");
  BaselineSpec spec = params;
  spec.kind = kind;
  switch (kind) {
    case BaselineKind::SignCusum:
      spec.median = median(sample);
      break;
    case BaselineKind::MadCusum: {
      spec.median = median(sample);
      double raw = mad(sample);
      if (!(raw > 0.0)) raise(ErrorKind::Degenerate, "MAD is zero; sample is degenerate");
      spec.mad_scaled = kMadToSigma * raw;
      std::vector<double> z(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i)
        z[i] = (sample[i] - spec.median) / spec.mad_scaled - spec.mad_allowance;
      spec.mad_e0 = mean(z);
      spec.mad_var0 = variance(z);
      if (!(spec.mad_var0 > 0.0)) raise(ErrorKind::Degenerate, "MAD-CUSUM increment is constant");
      break;
    }
    case BaselineKind::Ewma: {
      spec.mean = mean(sample);
      spec.sd = std::sqrt(variance(sample));
      if (!(spec.sd > 0.0)) raise(ErrorKind::Degenerate, "EWMA calibration sample is constant");
      if (!(spec.lambda_smoothing > 0.0 && spec.lambda_smoothing <= 1.0))
        raise(ErrorKind::InvalidArgument, "EWMA smoothing must lie in (0,1]");
      if (!(spec.l_sigma > 0.0)) raise(ErrorKind::InvalidArgument, "EWMA L must be positive");
      break;
    }
  }
  return spec;
}

BaselineAlarm run_baseline(const BaselineSpec& spec, std::span<const double> series) {
  BaselineAlarm out;
  switch (spec.kind) {
    case BaselineKind::SignCusum: {
      // two-sided CUSUM over sign(x - median) - k; PE threshold with
      // E = -k, Var = 1 (Bernoulli)
      double k = spec.sign_allowance;
      double h = -k + std::sqrt(1.0 / spec.eps);
      double up = 0.0, down = 0.0;
      for (std::size_t t = 0; t < series.size(); ++t) {
        double s = series[t] > spec.median ? 1.0 : (series[t] < spec.median ? -1.0 : 0.0);
        up = std::max(0.0, up + s - k);
        down = std::max(0.0, down - s - k);
        if (up > h || down > h) {
          out.first_alarm = t + 1;
          break;
        }
      }
      break;
    }
    case BaselineKind::MadCusum: {
      double h = spec.mad_e0 + std::sqrt(spec.mad_var0 / spec.eps);
      double g = 0.0;
      for (std::size_t t = 0; t < series.size(); ++t) {
        double z = (series[t] - spec.median) / spec.mad_scaled - spec.mad_allowance;
        g = std::max(0.0, g + z);
        if (g > h) {
          out.first_alarm = t + 1;
          break;
        }
      }
      break;
    }
    case BaselineKind::Ewma: {
      double lam = spec.lambda_smoothing;
      double limit = spec.l_sigma * spec.sd * std::sqrt(lam / (2.0 - lam));
      double z = spec.mean;
      for (std::size_t t = 0; t < series.size(); ++t) {
        z = lam * series[t] + (1.0 - lam) * z;
        if (std::abs(z - spec.mean) > limit) {
          out.first_alarm = t + 1;
          break;
        }
      }
      break;
    }
  }
  return out;
}

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::SignCusum: return "sign_cusum";
    case BaselineKind::MadCusum: return "mad_cusum";
    case BaselineKind::Ewma: return "ewma";
  }
  return "?";
}

}  // namespace gsa
