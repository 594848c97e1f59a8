#include "core/bench.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "core/detector.hpp"
#include "core/error.hpp"
#include "core/json_io.hpp"
#include "core/stats.hpp"

namespace gsa {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// purpose tags for per-trial sub-streams
constexpr std::uint64_t kPurposeCal = 1;
constexpr std::uint64_t kPurposeTest = 2;
constexpr std::uint64_t kPurposeThreshold = 3;
constexpr std::uint64_t kPurposeMde = 4;
constexpr std::uint64_t kPurposeOc = 5;

Rng trial_rng(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t purpose) {
  return Rng(substream_seed(substream_seed(base_seed, trial), purpose));
}

struct TrialOutcome {
  std::int64_t alarm = -1;  // 1-based; -1 none, -2 config failed
  double j_s = 0.0;
  double eta = 0.0;
  double cond_f = 0.0;
  bool gsa = false;
};

const std::string& config_name(const DetectorConfig& cfg) {
  if (std::holds_alternative<GsaConfig>(cfg)) return std::get<GsaConfig>(cfg).name;
  return std::get<BaselineConfig>(cfg).name;
}

CalibratedModel fit_gsa_trial(const GsaConfig& cfg, const ExperimentManifest& manifest,
                              std::span<const double> cal, std::uint64_t trial) {
  BasisSpec basis = cfg.basis ? *cfg.basis : select_basis(cal);
  CalibrationOptions opts;
  opts.winsor_alpha = cfg.winsor_alpha;
  opts.solver = cfg.solver;
  Rng mde_rng = trial_rng(manifest.base_seed, trial, kPurposeMde);
  CalibratedModel model = calibrate(cal, basis, cfg.mde, opts, &mde_rng);
  model.rule = cfg.rule;

  const ThresholdSpec& thr = cfg.threshold ? *cfg.threshold : manifest.threshold;
  if (thr.kind == ThresholdKind::Simulation || thr.kind == ThresholdKind::Arl0Bisect) {
    H0Source source = H0Source::parametric(manifest.series.h0);
    Rng thr_rng = trial_rng(manifest.base_seed, trial, kPurposeThreshold);
    apply_threshold(model, thr, &source, &thr_rng);
  } else {
    apply_threshold(model, thr);
  }
  return model;
}

}  // namespace

void ExperimentManifest::validate() const {
  series.validate();
  if (n_trials < 1) raise(ErrorKind::InvalidArgument, "manifest needs n_trials >= 1");
  if (series.tau >= series.n_total)
    raise(ErrorKind::InvalidArgument, "manifest requires tau < n_total");
  if (configs.empty()) raise(ErrorKind::InvalidArgument, "manifest needs at least one config");
  if (!(std::abs(ar1_rho) < 1.0)) raise(ErrorKind::InvalidArgument, "|ar1_rho| must be < 1");
  threshold.validate();
}

std::vector<double> ar1_wrap(std::span<const double> xs, double rho) {
  if (!(std::abs(rho) < 1.0)) raise(ErrorKind::InvalidArgument, "|rho| must be < 1");
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  if (rho == 0.0) return {xs.begin(), xs.end()};
  double scale = std::sqrt(1.0 - rho * rho);
  out[0] = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) out[i] = rho * out[i - 1] + scale * xs[i];
  return out;
}

MetricsReport run_experiment(const ExperimentManifest& manifest) {
  manifest.validate();
  const std::size_t n_cfg = manifest.configs.size();
  const std::size_t n_trials = manifest.n_trials;

  // outcome[trial * n_cfg + cfg]
  std::vector<TrialOutcome> outcomes(n_trials * n_cfg);

  auto worker_body = [&](std::size_t t) {
    Rng cal_rng = trial_rng(manifest.base_seed, t, kPurposeCal);
    std::vector<double> cal = sample(manifest.series.h0, manifest.n_cal, cal_rng);
    if (manifest.ar1_rho != 0.0) cal = ar1_wrap(cal, manifest.ar1_rho);

    SeriesSpec spec = manifest.series;
    Rng test_rng = trial_rng(manifest.base_seed, t, kPurposeTest);
    std::vector<double> series = generate_series(spec, test_rng);
    if (manifest.ar1_rho != 0.0) series = ar1_wrap(series, manifest.ar1_rho);

    for (std::size_t c = 0; c < n_cfg; ++c) {
      TrialOutcome& out = outcomes[t * n_cfg + c];
      try {
        if (std::holds_alternative<GsaConfig>(manifest.configs[c])) {
          const auto& cfg = std::get<GsaConfig>(manifest.configs[c]);
          CalibratedModel model = fit_gsa_trial(cfg, manifest, cal, t);
          out.gsa = true;
          out.j_s = model.diagnostics.j_s;
          out.eta = model.diagnostics.eta;
          out.cond_f = model.diagnostics.cond_f;
          AlarmResult res = run(model, series);
          out.alarm = res.first_alarm ? static_cast<std::int64_t>(*res.first_alarm) : -1;
        } else {
          const auto& cfg = std::get<BaselineConfig>(manifest.configs[c]);
          BaselineSpec spec_b = calibrate_baseline(cfg.params.kind, cal, cfg.params);
          BaselineAlarm res = run_baseline(spec_b, series);
          out.alarm = res.first_alarm ? static_cast<std::int64_t>(*res.first_alarm) : -1;
        }
      } catch (const Error&) {
        out.alarm = -2;
      }
    }
  };

  std::size_t n_threads = manifest.threads > 0
                              ? manifest.threads
                              : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_trials);
  if (n_threads <= 1) {
    for (std::size_t t = 0; t < n_trials; ++t) worker_body(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t t = next.fetch_add(1);
          if (t >= n_trials) return;
          worker_body(t);
        }
      });
    for (auto& th : pool) th.join();
  }

  // deterministic reduction in trial order
  MetricsReport report;
  report.manifest = manifest;
  report.configs.resize(n_cfg);
  const auto tau = static_cast<std::int64_t>(manifest.series.tau);
  for (std::size_t c = 0; c < n_cfg; ++c) {
    ConfigMetrics& m = report.configs[c];
    m.name = config_name(manifest.configs[c]);
    m.n_trials = n_trials;
    m.alarms.resize(n_trials);
    std::vector<double> delays;
    double j_sum = 0.0, eta_sum = 0.0, cond_sum = 0.0;
    std::size_t gsa_ok = 0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const TrialOutcome& out = outcomes[t * n_cfg + c];
      m.alarms[t] = out.alarm;
      if (out.alarm == -2) {
        ++m.n_failed;
        continue;
      }
      if (out.gsa) {
        j_sum += out.j_s;
        eta_sum += out.eta;
        cond_sum += out.cond_f;
        ++gsa_ok;
      }
      if (out.alarm < 0) {
        ++m.n_missed;
      } else if (out.alarm < tau) {
        ++m.n_false;
      } else {
        ++m.n_detected;
        delays.push_back(static_cast<double>(out.alarm - tau));
      }
    }
    m.far = static_cast<double>(m.n_false) / static_cast<double>(n_trials);
    m.det_rate = static_cast<double>(m.n_detected) / static_cast<double>(n_trials);
    if (!delays.empty()) {
      m.add_mean = mean(delays);
      if (delays.size() > 1) {
        double sd = std::sqrt(variance(delays) * static_cast<double>(delays.size()) /
                              static_cast<double>(delays.size() - 1));
        m.add_se = sd / std::sqrt(static_cast<double>(delays.size()));
      }
    }
    if (gsa_ok > 0) {
      m.j_s_mean = j_sum / static_cast<double>(gsa_ok);
      m.eta_mean = eta_sum / static_cast<double>(gsa_ok);
      m.cond_f_mean = cond_sum / static_cast<double>(gsa_ok);
    }
  }
  return report;
}

std::vector<OcPoint> oc_curve(const ExperimentManifest& manifest,
                              const std::vector<double>& arl0_grid) {
  manifest.validate();
  for (double g : arl0_grid)
    if (!(g >= 50.0)) raise(ErrorKind::InvalidArgument, "ARL0 grid values must be >= 50");

  std::vector<OcPoint> points;
  for (std::size_t c = 0; c < manifest.configs.size(); ++c) {
    if (!std::holds_alternative<GsaConfig>(manifest.configs[c]))
      raise(ErrorKind::InvalidArgument, "oc-curve supports GSA configs only");
    const auto& cfg = std::get<GsaConfig>(manifest.configs[c]);

    // One calibration per config on a dedicated H0 sample.
    Rng cal_rng = trial_rng(manifest.base_seed, c, kPurposeOc);
    std::vector<double> cal = sample(manifest.series.h0, manifest.n_cal, cal_rng);
    if (manifest.ar1_rho != 0.0) cal = ar1_wrap(cal, manifest.ar1_rho);

    for (std::size_t gi = 0; gi < arl0_grid.size(); ++gi) {
      OcPoint pt;
      pt.config = cfg.name;
      pt.arl0_target = arl0_grid[gi];
      pt.n_trials = manifest.n_trials;
      try {
        BasisSpec basis = cfg.basis ? *cfg.basis : select_basis(cal);
        CalibrationOptions copts;
        copts.winsor_alpha = cfg.winsor_alpha;
        copts.solver = cfg.solver;
        Rng mde_rng = trial_rng(manifest.base_seed, c * 1000 + gi, kPurposeMde);
        CalibratedModel model = calibrate(cal, basis, cfg.mde, copts, &mde_rng);
        model.rule = cfg.rule;

        H0Source source = H0Source::parametric(manifest.series.h0);
        Arl0Options aopts = manifest.threshold.arl0;
        aopts.target = arl0_grid[gi];
        Rng thr_rng = trial_rng(manifest.base_seed, c * 1000 + gi, kPurposeThreshold);
        Arl0Result bis = arl0_bisect(model, source, aopts, thr_rng);
        model.threshold = bis.h;
        model.threshold_kind = ThresholdKind::Arl0Bisect;
        pt.arl0_achieved = bis.achieved;

        // post-change delay, change from the very first sample
        SeriesSpec spec = manifest.series;
        spec.tau = 1;
        std::vector<double> delays;
        for (std::size_t t = 0; t < manifest.n_trials; ++t) {
          Rng test_rng = trial_rng(manifest.base_seed, (c * 1000 + gi) * 100003 + t, kPurposeTest);
          std::vector<double> series = generate_series(spec, test_rng);
          if (manifest.ar1_rho != 0.0) series = ar1_wrap(series, manifest.ar1_rho);
          AlarmResult res = run(model, series);
          if (res.first_alarm) delays.push_back(static_cast<double>(*res.first_alarm - 1));
        }
        pt.n_detected = delays.size();
        if (!delays.empty()) {
          pt.add_mean = mean(delays);
          if (delays.size() > 1) {
            double sd = std::sqrt(variance(delays) * static_cast<double>(delays.size()) /
                                  static_cast<double>(delays.size() - 1));
            pt.add_se = sd / std::sqrt(static_cast<double>(delays.size()));
          }
        }
      } catch (const Error& e) {
        pt.failed = true;
        pt.error = e.what();
      }
      points.push_back(std::move(pt));
    }
  }
  return points;
}

// ---- JSON / CSV ----

namespace {

ordered_json gsa_config_to_json(const GsaConfig& cfg) {
  ordered_json j;
  j["type"] = "gsa";
  j["name"] = cfg.name;
  if (cfg.basis) j["basis"] = basis_to_json(*cfg.basis);
  j["mde"] = mde_to_json(cfg.mde);
  j["winsor"] = cfg.winsor_alpha;
  j["rule"] = to_string(cfg.rule);
  if (cfg.threshold) j["threshold"] = threshold_spec_to_json(*cfg.threshold);
  return j;
}

ordered_json baseline_config_to_json(const BaselineConfig& cfg) {
  ordered_json j;
  j["type"] = to_string(cfg.params.kind);
  j["name"] = cfg.name;
  if (cfg.params.kind == BaselineKind::Ewma) {
    j["lambda"] = cfg.params.lambda_smoothing;
    j["l_sigma"] = cfg.params.l_sigma;
  } else {
    j["epsilon"] = cfg.params.eps;
  }
  if (cfg.params.kind == BaselineKind::MadCusum) j["allowance"] = cfg.params.mad_allowance;
  return j;
}

DetectorConfig config_from_json(const json& j) {
  std::string type = j.value("type", "gsa");
  std::string name = j.value("name", type);
  if (type == "gsa") {
    GsaConfig cfg;
    cfg.name = name;
    if (j.contains("basis")) cfg.basis = basis_from_json(j.at("basis"));
    if (j.contains("mde")) cfg.mde = mde_from_json(j.at("mde"));
    cfg.winsor_alpha = j.value("winsor", 0.10);
    if (j.contains("rule")) cfg.rule = rule_from_string(j.at("rule").get<std::string>());
    if (j.contains("threshold")) cfg.threshold = threshold_spec_from_json(j.at("threshold"));
    return cfg;
  }
  BaselineConfig cfg;
  cfg.name = name;
  cfg.params.kind = baseline_kind_from_string(type);
  cfg.params.eps = j.value("epsilon", 0.005);
  cfg.params.lambda_smoothing = j.value("lambda", 0.1);
  cfg.params.l_sigma = j.value("l_sigma", 3.5);
  cfg.params.mad_allowance = j.value("allowance", 0.5);
  return cfg;
}

}  // namespace

ExperimentManifest manifest_from_json(const json& j) {
  if (j.value("schema_version", 1) != 1)
    raise(ErrorKind::Parse, "unsupported manifest schema_version");
  ExperimentManifest m;
  if (!j.contains("series")) raise(ErrorKind::Parse, "manifest needs a series spec");
  m.series = series_spec_from_json(j.at("series"));
  if (j.contains("threshold")) m.threshold = threshold_spec_from_json(j.at("threshold"));
  m.n_trials = j.value("n_trials", std::size_t{2000});
  m.n_cal = j.value("n_cal", std::size_t{1000});
  m.base_seed = j.value("base_seed", std::uint64_t{0});
  m.ar1_rho = j.value("ar1_rho", 0.0);
  m.threads = j.value("threads", std::size_t{0});
  if (!j.contains("configs") || !j.at("configs").is_array())
    raise(ErrorKind::Parse, "manifest needs a configs array");
  for (const auto& cj : j.at("configs")) m.configs.push_back(config_from_json(cj));
  m.validate();
  return m;
}

ordered_json manifest_to_json(const ExperimentManifest& m) {
  ordered_json j;
  j["schema_version"] = 1;
  j["series"] = series_spec_to_json(m.series);
  j["threshold"] = threshold_spec_to_json(m.threshold);
  j["n_trials"] = m.n_trials;
  j["n_cal"] = m.n_cal;
  j["base_seed"] = m.base_seed;
  j["ar1_rho"] = m.ar1_rho;
  j["threads"] = m.threads;
  ordered_json configs = ordered_json::array();
  for (const auto& cfg : m.configs) {
    if (std::holds_alternative<GsaConfig>(cfg))
      configs.push_back(gsa_config_to_json(std::get<GsaConfig>(cfg)));
    else
      configs.push_back(baseline_config_to_json(std::get<BaselineConfig>(cfg)));
  }
  j["configs"] = configs;
  return j;
}

ordered_json report_to_json(const MetricsReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  // threads is an execution knob, not part of the experiment definition;
  // reports must be byte-identical across worker counts
  ordered_json echo = manifest_to_json(report.manifest);
  echo.erase("threads");
  j["manifest"] = echo;
  ordered_json configs = ordered_json::array();
  for (const auto& m : report.configs) {
    ordered_json cj;
    cj["name"] = m.name;
    cj["n_trials"] = m.n_trials;
    cj["n_detected"] = m.n_detected;
    cj["n_false"] = m.n_false;
    cj["n_missed"] = m.n_missed;
    cj["n_failed"] = m.n_failed;
    cj["far"] = m.far;
    cj["det_rate"] = m.det_rate;
    cj["add_mean"] = m.add_mean ? ordered_json(*m.add_mean) : ordered_json(nullptr);
    cj["add_se"] = m.add_se ? ordered_json(*m.add_se) : ordered_json(nullptr);
    ordered_json diag;
    diag["j_s"] = m.j_s_mean ? ordered_json(*m.j_s_mean) : ordered_json(nullptr);
    diag["eta"] = m.eta_mean ? ordered_json(*m.eta_mean) : ordered_json(nullptr);
    diag["rho"] = m.eta_mean ? ordered_json(*m.eta_mean) : ordered_json(nullptr);
    diag["cond_f"] = m.cond_f_mean ? ordered_json(*m.cond_f_mean) : ordered_json(nullptr);
    cj["diagnostics"] = diag;
    configs.push_back(cj);
  }
  j["configs"] = configs;
  return j;
}

std::string report_alarms_csv(const MetricsReport& report) {
  std::string out = "trial,config,alarm\n";
  for (std::size_t t = 0; t < report.manifest.n_trials; ++t) {
    for (const auto& m : report.configs) {
      out += std::to_string(t) + "," + m.name + ",";
      std::int64_t a = m.alarms[t];
      if (a > 0) out += std::to_string(a);
      else if (a == -2) out += "failed";
      out += "\n";
    }
  }
  return out;
}

std::string oc_curve_csv(const std::vector<OcPoint>& points) {
  std::string out = "config,arl0_target,arl0_achieved,add,add_se,n_detected,n_trials,failed\n";
  for (const auto& p : points) {
    out += p.config + ",";
    out += format_double(p.arl0_target) + ",";
    out += p.failed ? "" : format_double(p.arl0_achieved);
    out += ",";
    out += p.add_mean ? format_double(*p.add_mean) : "";
    out += ",";
    out += p.add_se ? format_double(*p.add_se) : "";
    out += ",";
    out += std::to_string(p.n_detected) + "," + std::to_string(p.n_trials) + ",";
    out += p.failed ? "1" : "0";
    out += "\n";
  }
  return out;
}

ExperimentManifest repro_manifest_table_4_2() {
  ExperimentManifest m;
  m.series.h0 = Distribution::pearson3(10.0);
  m.series.change = Change::mean_shift(0.3);
  m.series.tau = 200;
  m.series.n_total = 1000;
  m.n_trials = 2000;
  m.n_cal = 1000;
  m.base_seed = 42;
  m.threshold.kind = ThresholdKind::Pe;
  m.threshold.epsilon = 0.01;
  m.threshold.scale = 1.0;
  for (int s = 1; s <= 4; ++s) {
    GsaConfig cfg;
    cfg.name = "poly_s" + std::to_string(s);
    cfg.basis = BasisSpec::make(BasisFamily::Poly, s);
    cfg.mde = MdeSpec::mean_shift(0.3);
    m.configs.push_back(cfg);
  }
  return m;
}

}  // namespace gsa
