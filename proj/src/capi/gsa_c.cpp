#include "gsa/gsa.h"

#include <cstring>
#include <new>
#include <string>

#include "core/bench.hpp"
#include "core/detector.hpp"
#include "core/error.hpp"
#include "core/fit.hpp"
#include "core/json_io.hpp"

namespace {

thread_local std::string g_last_error;

gsa_status status_of(gsa::ErrorKind kind) {
  using gsa::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return GSA_ERR_INVALID_ARGUMENT;
    case ErrorKind::Degenerate: return GSA_ERR_DEGENERATE;
    case ErrorKind::Calibration: return GSA_ERR_CALIBRATION;
    case ErrorKind::Numeric: return GSA_ERR_NUMERIC;
    case ErrorKind::State: return GSA_ERR_STATE;
    case ErrorKind::Parse: return GSA_ERR_PARSE;
  }
  return GSA_ERR_INTERNAL;
}

template <typename Fn>
gsa_status guarded(Fn&& fn) {
  try {
    fn();
    return GSA_OK;
  } catch (const gsa::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GSA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return GSA_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gsa::FitOptions fit_options_from_json(const char* options_json) {
  gsa::FitOptions opts;
  if (!options_json || !*options_json) return opts;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(options_json);
  } catch (const nlohmann::json::exception& e) {
    gsa::raise(gsa::ErrorKind::Parse, std::string("options JSON parse error: ") + e.what());
  }
  if (j.contains("basis")) opts.basis = gsa::basis_from_json(j.at("basis"));
  opts.auto_order = j.value("auto_order", false);
  opts.order_max = j.value("order_max", 4);
  opts.order_rel_gain = j.value("order_rel_gain", 0.05);
  if (j.contains("mde")) opts.mde = gsa::mde_from_json(j.at("mde"));
  opts.winsor_alpha = j.value("winsor", 0.10);
  if (j.contains("rule")) opts.rule = gsa::rule_from_string(j.at("rule").get<std::string>());
  if (j.contains("threshold")) opts.threshold = gsa::threshold_spec_from_json(j.at("threshold"));
  opts.log1p_input = j.value("log1p", false);
  opts.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("h0")) opts.h0_parametric = gsa::distribution_from_json(j.at("h0"));
  return opts;
}

}  // namespace

struct gsa_model {
  gsa::CalibratedModel m;
};

struct gsa_detector {
  const gsa_model* model;
  gsa::Detector det;
  double last_lambda = 0.0;
};

extern "C" {

const char* gsa_version(void) { return "0.1.0"; }

const char* gsa_last_error(void) { return g_last_error.c_str(); }

void gsa_free_string(char* s) { delete[] s; }
void gsa_free_buffer(double* p) { delete[] p; }

gsa_status gsa_calibrate(const double* data, size_t len, const char* options_json,
                         gsa_model** out_model) {
  if (!data || !out_model) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto opts = fit_options_from_json(options_json);
    auto model = gsa::fit(std::span<const double>(data, len), opts);
    *out_model = new gsa_model{std::move(model)};
  });
}

gsa_status gsa_model_from_json(const char* json, gsa_model** out_model) {
  if (!json || !out_model) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out_model = new gsa_model{gsa::model_from_json(json)}; });
}

gsa_status gsa_model_to_json(const gsa_model* model, char** out_json) {
  if (!model || !out_json) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out_json = dup_string(gsa::model_to_json(model->m)); });
}

void gsa_model_free(gsa_model* model) { delete model; }

gsa_status gsa_model_get_info(const gsa_model* model, gsa_model_info* out) {
  if (!model || !out) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  const auto& m = model->m;
  out->order = m.order();
  out->k0 = m.k0;
  out->e0 = m.e0;
  out->var0 = m.var0;
  out->threshold = m.threshold;
  out->j_s = m.diagnostics.j_s;
  out->eta = m.diagnostics.eta;
  out->cond_f = m.diagnostics.cond_f;
  out->rule = static_cast<int>(m.rule);
  out->threshold_kind = static_cast<int>(m.threshold_kind);
  out->log1p_input = m.log1p_input ? 1 : 0;
  return GSA_OK;
}

gsa_status gsa_model_coeffs(const gsa_model* model, double* out, size_t* inout_len) {
  if (!model || !inout_len) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  size_t n = model->m.k.size();
  if (!out || *inout_len < n) {
    *inout_len = n;
    g_last_error = "buffer too small";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(out, model->m.k.data(), n * sizeof(double));
  *inout_len = n;
  return GSA_OK;
}

gsa_status gsa_model_llr(const gsa_model* model, double x, double* out_lambda) {
  if (!model || !out_lambda) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    double v = x;
    if (model->m.log1p_input) {
      if (v <= -1.0) gsa::raise(gsa::ErrorKind::InvalidArgument, "log1p input requires x > -1");
      v = std::log1p(v);
    }
    *out_lambda = gsa::llr(model->m, v);
  });
}

gsa_status gsa_detector_new(const gsa_model* model, gsa_detector** out) {
  if (!model || !out) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    if (std::isnan(model->m.threshold))
      gsa::raise(gsa::ErrorKind::InvalidArgument, "model has no threshold");
    *out = new gsa_detector{model, gsa::Detector(model->m.rule, model->m.threshold)};
  });
}

gsa_status gsa_detector_step(gsa_detector* det, double x, gsa_step_result* out) {
  if (!det || !out) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    double v = x;
    if (det->model->m.log1p_input) {
      if (v <= -1.0) gsa::raise(gsa::ErrorKind::InvalidArgument, "log1p input requires x > -1");
      v = std::log1p(v);
    }
    double lam = gsa::llr(det->model->m, v);
    bool alarm = det->det.step(lam);
    out->t = det->det.t();
    out->lambda = lam;
    out->stat = det->det.stat();
    out->alarm = alarm ? 1 : 0;
  });
}

gsa_status gsa_detector_reset(gsa_detector* det) {
  if (!det) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  det->det.reset();
  return GSA_OK;
}

void gsa_detector_free(gsa_detector* det) { delete det; }

gsa_status gsa_generate_series(const char* series_spec_json, double** out, size_t* out_len) {
  if (!series_spec_json || !out || !out_len) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(series_spec_json);
    } catch (const nlohmann::json::exception& e) {
      gsa::raise(gsa::ErrorKind::Parse, std::string("series spec parse error: ") + e.what());
    }
    auto spec = gsa::series_spec_from_json(j);
    auto series = gsa::generate_series(spec);
    auto* buf = new double[series.size()];
    std::memcpy(buf, series.data(), series.size() * sizeof(double));
    *out = buf;
    *out_len = series.size();
  });
}

gsa_status gsa_bench_run_ex(const char* manifest_json, char** out_report_json,
                            char** out_alarms_csv) {
  if (!manifest_json || (!out_report_json && !out_alarms_csv)) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(manifest_json);
    } catch (const nlohmann::json::exception& e) {
      gsa::raise(gsa::ErrorKind::Parse, std::string("manifest parse error: ") + e.what());
    }
    auto manifest = gsa::manifest_from_json(j);
    auto report = gsa::run_experiment(manifest);
    if (out_report_json)
      *out_report_json = dup_string(gsa::report_to_json(report).dump(2) + "\n");
    if (out_alarms_csv) *out_alarms_csv = dup_string(gsa::report_alarms_csv(report));
  });
}

gsa_status gsa_bench_run(const char* manifest_json, char** out_report_json) {
  return gsa_bench_run_ex(manifest_json, out_report_json, nullptr);
}

gsa_status gsa_oc_curve(const char* manifest_json, const double* arl0_grid, size_t grid_len,
                        char** out_csv) {
  if (!manifest_json || !arl0_grid || grid_len == 0 || !out_csv) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(manifest_json);
    } catch (const nlohmann::json::exception& e) {
      gsa::raise(gsa::ErrorKind::Parse, std::string("manifest parse error: ") + e.what());
    }
    auto manifest = gsa::manifest_from_json(j);
    std::vector<double> grid(arl0_grid, arl0_grid + grid_len);
    auto points = gsa::oc_curve(manifest, grid);
    *out_csv = dup_string(gsa::oc_curve_csv(points));
  });
}

gsa_status gsa_repro_manifest(const char* name, char** out_manifest_json) {
  if (!name || !out_manifest_json) {
    g_last_error = "null argument";
    return GSA_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    if (std::string(name) != "table-4-2")
      gsa::raise(gsa::ErrorKind::InvalidArgument, std::string("unknown repro manifest: ") + name);
    auto manifest = gsa::repro_manifest_table_4_2();
    *out_manifest_json = dup_string(gsa::manifest_to_json(manifest).dump(2) + "\n");
  });
}

}  // extern "C"
