#pragma once

#include <optional>
#include <span>

namespace gsa {

enum class BaselineKind { SignCusum, MadCusum, Ewma };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::SignCusum;
  double eps = 0.005;             // Sign/Mad PE level
  double lambda_smoothing = 0.1;  // EWMA
  double l_sigma = 3.5;           // EWMA control-limit multiplier
  double mad_allowance = 0.5;     // MAD-CUSUM reference drift k
  double sign_allowance = 0.5;    // Sign-CUSUM reference drift; without it the
                                  // H0 walk has zero drift and ARL0 ~ h^2

  // calibration results
  double median = 0.0;
  double mad_scaled = 0.0;  // 1.4826 * MAD
  double mean = 0.0;
  double sd = 0.0;
  double mad_e0 = 0.0;   // mean of z - k over the calibration sample
  double mad_var0 = 1.0; // variance of z - k over the calibration sample
};

BaselineSpec calibrate_baseline(BaselineKind kind, std::span<const double> sample,
                                const BaselineSpec& params = {});

struct BaselineAlarm {
  std::optional<std::size_t> first_alarm;  // 1-based
};

BaselineAlarm run_baseline(const BaselineSpec& spec, std::span<const double> series);

const char* to_string(BaselineKind kind);

}  // namespace gsa
