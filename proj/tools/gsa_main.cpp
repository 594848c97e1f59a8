// gsa command line: calibrate / detect / simulate / bench / oc-curve.
// Built entirely on the public C API; machine-readable payloads go to stdout,
// human diagnostics to stderr. Exit codes: 0 success, 2 usage or validation
// failure, 3 internal numeric failure.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsa/gsa.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int exit_code_for(gsa_status st) {
  switch (st) {
    case GSA_OK:
      return 0;
    case GSA_ERR_NUMERIC:
    case GSA_ERR_STATE:
    case GSA_ERR_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

[[noreturn]] void fail(gsa_status st, const std::string& context) {
  ordered_json err;
  err["error"]["status"] = static_cast<int>(st);
  err["error"]["context"] = context;
  err["error"]["message"] = gsa_last_error();
  std::cerr << err.dump() << "\n";
  std::exit(exit_code_for(st));
}

[[noreturn]] void usage_fail(const std::string& message) {
  ordered_json err;
  err["error"]["status"] = static_cast<int>(GSA_ERR_INVALID_ARGUMENT);
  err["error"]["message"] = message;
  std::cerr << err.dump() << "\n";
  std::exit(2);
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_fail("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_or_stdout(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) usage_fail("cannot write file: " + path);
  out << content;
}

// Single-column CSV with header `x`; accepts CRLF.
std::vector<double> read_series_csv(const std::string& path) {
  std::string text = read_file(path);
  std::vector<double> xs;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line != "x") usage_fail("CSV must start with the header line `x`");
      continue;
    }
    if (line.empty()) continue;
    char* end = nullptr;
    double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      usage_fail("malformed CSV value at line " + std::to_string(lineno) + ": " + line);
    xs.push_back(v);
  }
  return xs;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GSA_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::strtod(tok.c_str(), nullptr));
  }
  return out;
}

struct CalibrateArgs {
  std::string input = "-";
  std::string output;
  std::string basis = "auto";
  int order = 2;
  bool order_given = false;
  std::string frac_exponents;
  double phi_max = 10.0;
  double winsor = 0.10;
  std::optional<double> mde_delta;
  std::string mde_per_moment;
  double mde_var_inflation = 0.0;
  double eps = 0.01;
  std::string threshold = "pe";
  double threshold_scale = 1.0;
  std::optional<double> ar1_rho;
  std::size_t mc_blocks = 50;
  std::size_t mc_block_len = 500;
  double arl0_target = 200.0;
  std::size_t arl0_runs = 200;
  std::string rule = "cusum";
  bool auto_order = false;
  int order_max = 4;
  double rel_gain = 0.05;
  bool log1p = false;
  std::uint64_t seed = default_seed();
};

int cmd_calibrate(const CalibrateArgs& a) {
  std::vector<double> xs = read_series_csv(a.input);

  ordered_json opts;
  if (a.basis != "auto") {
    ordered_json basis;
    basis["family"] = a.basis;
    basis["order"] = a.order;
    basis["clip_bound"] = a.phi_max;
    if (!a.frac_exponents.empty()) basis["frac_exponents"] = parse_double_list(a.frac_exponents);
    opts["basis"] = basis;
  } else if (a.order_given || a.phi_max != 10.0) {
    // auto family but explicit order/clip: resolved after selection inside the
    // library is not expressible; require an explicit family instead.
    if (a.order_given) usage_fail("--order requires an explicit --basis family");
  }
  if (a.auto_order) {
    opts["auto_order"] = true;
    opts["order_max"] = a.order_max;
    opts["order_rel_gain"] = a.rel_gain;
  }
  if (a.mde_delta && !a.mde_per_moment.empty())
    usage_fail("--mde-delta and --mde-per-moment are mutually exclusive");
  ordered_json mde;
  if (!a.mde_per_moment.empty()) {
    mde["kind"] = "per_moment";
    mde["deltas"] = parse_double_list(a.mde_per_moment);
  } else {
    mde["kind"] = "mean_shift_sigma";
    mde["delta"] = a.mde_delta.value_or(0.5);
  }
  if (a.mde_var_inflation != 0.0) mde["var_inflation"] = a.mde_var_inflation;
  opts["mde"] = mde;
  opts["winsor"] = a.winsor;
  opts["rule"] = a.rule;
  ordered_json thr;
  thr["kind"] = a.threshold == "arl0-bisect" ? "arl0" : a.threshold;
  thr["epsilon"] = a.eps;
  thr["scale"] = a.threshold_scale;
  if (a.ar1_rho) thr["ar1_rho"] = *a.ar1_rho;
  thr["blocks"] = a.mc_blocks;
  thr["block_length"] = a.mc_block_len;
  thr["arl0_target"] = a.arl0_target;
  thr["arl0_runs"] = a.arl0_runs;
  opts["threshold"] = thr;
  opts["log1p"] = a.log1p;
  opts["seed"] = a.seed;

  gsa_model* model = nullptr;
  gsa_status st = gsa_calibrate(xs.data(), xs.size(), opts.dump().c_str(), &model);
  if (st != GSA_OK) fail(st, "calibrate");

  char* model_json = nullptr;
  st = gsa_model_to_json(model, &model_json);
  if (st != GSA_OK) {
    gsa_model_free(model);
    fail(st, "serialize model");
  }
  write_file_or_stdout(a.output, std::string(model_json) + "\n");

  gsa_model_info info{};
  gsa_model_get_info(model, &info);
  json parsed = json::parse(model_json);
  std::cerr << "calibrated: basis=" << parsed["basis"]["family"].get<std::string>()
            << " s=" << info.order << " rule=" << a.rule << "\n"
            << "  cond(F)=" << info.cond_f << "  J(s)=" << info.j_s << "  eta=" << info.eta
            << "\n"
            << "  E0=" << info.e0 << "  Var0=" << info.var0 << "  threshold=" << info.threshold
            << " (" << (a.threshold == "arl0-bisect" ? "arl0" : a.threshold) << ")\n";

  gsa_free_string(model_json);
  gsa_model_free(model);
  return 0;
}

struct DetectArgs {
  std::string model_path;
  std::string input = "-";
  std::string trajectory;
  std::string rule_override;
  bool log1p = false;
};

int cmd_detect(const DetectArgs& a) {
  std::string model_text = read_file(a.model_path);

  if (!a.rule_override.empty() || a.log1p) {
    json mj;
    try {
      mj = json::parse(model_text);
    } catch (const json::exception& e) {
      usage_fail(std::string("model JSON parse error: ") + e.what());
    }
    if (a.log1p && !mj.value("log1p", false))
      usage_fail("--log1p given but the model was calibrated on raw data");
    if (!a.rule_override.empty()) {
      std::string kind = mj.value("threshold_kind", "pe");
      if (a.rule_override == "srp" && kind != "arl0" && kind != "simulation")
        usage_fail(
            "model threshold was not calibrated for SRP; recalibrate with "
            "--threshold arl0-bisect (or simulation)");
      mj["rule"] = a.rule_override;
      model_text = mj.dump();
    }
  }

  gsa_model* model = nullptr;
  gsa_status st = gsa_model_from_json(model_text.c_str(), &model);
  if (st != GSA_OK) fail(st, "load model");

  gsa_detector* det = nullptr;
  st = gsa_detector_new(model, &det);
  if (st != GSA_OK) {
    gsa_model_free(model);
    fail(st, "create detector");
  }

  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file_in.open(a.input);
    if (!file_in) usage_fail("cannot open input: " + a.input);
    in = &file_in;
  }

  std::ofstream traj;
  if (!a.trajectory.empty()) {
    traj.open(a.trajectory);
    if (!traj) usage_fail("cannot write trajectory: " + a.trajectory);
    traj << "t,lambda,stat\n";
  }

  std::string line;
  std::size_t processed = 0, skipped = 0;
  bool alarmed = false;
  bool is_header_candidate = true;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (is_header_candidate && line == "x") {
      is_header_candidate = false;
      continue;  // tolerate a CSV header on the stream
    }
    is_header_candidate = false;
    char* end = nullptr;
    double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') {
      ++skipped;
      std::cerr << "warning: skipping malformed input line: " << line << "\n";
      continue;
    }
    gsa_step_result res{};
    st = gsa_detector_step(det, v, &res);
    if (st != GSA_OK) {
      gsa_detector_free(det);
      gsa_model_free(model);
      fail(st, "detector step");
    }
    ++processed;
    if (traj.is_open())
      traj << res.t << "," << res.lambda << "," << res.stat << "\n";
    if (res.alarm) {
      ordered_json event;
      event["t"] = res.t;
      event["stat"] = res.stat;
      event["lambda"] = res.lambda;
      std::cout << event.dump() << "\n";
      alarmed = true;
      break;
    }
  }

  std::cerr << "processed=" << processed << " skipped=" << skipped
            << " alarm=" << (alarmed ? "yes" : "no") << "\n";
  gsa_detector_free(det);
  gsa_model_free(model);
  return 0;
}

struct SimulateArgs {
  std::string spec_path;
  std::string h0_json;
  std::string change_json;
  std::size_t tau = 200;
  std::size_t n_total = 1000;
  std::uint64_t seed = default_seed();
  std::string output;
};

int cmd_simulate(const SimulateArgs& a) {
  ordered_json spec;
  if (!a.spec_path.empty()) {
    try {
      spec = ordered_json::parse(read_file(a.spec_path));
    } catch (const json::exception& e) {
      usage_fail(std::string("series spec parse error: ") + e.what());
    }
  } else {
    if (a.h0_json.empty()) usage_fail("simulate needs --spec or --h0");
    try {
      spec["h0"] = json::parse(a.h0_json);
      if (!a.change_json.empty()) spec["change"] = json::parse(a.change_json);
    } catch (const json::exception& e) {
      usage_fail(std::string("inline spec parse error: ") + e.what());
    }
    spec["tau"] = a.tau;
    spec["n_total"] = a.n_total;
    spec["seed"] = a.seed;
  }

  double* buf = nullptr;
  size_t len = 0;
  gsa_status st = gsa_generate_series(spec.dump().c_str(), &buf, &len);
  if (st != GSA_OK) fail(st, "generate series");

  std::string out = "x\n";
  char tmp[40];
  for (size_t i = 0; i < len; ++i) {
    std::snprintf(tmp, sizeof(tmp), "%.17g", buf[i]);
    out += tmp;
    out += "\n";
  }
  gsa_free_buffer(buf);
  write_file_or_stdout(a.output, out);
  return 0;
}

struct BenchArgs {
  std::string manifest_path;
  std::string repro;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string output;
  std::string alarms_csv;
};

int cmd_bench(const BenchArgs& a) {
  std::string manifest_text;
  if (!a.repro.empty()) {
    char* canned = nullptr;
    gsa_status st = gsa_repro_manifest(a.repro.c_str(), &canned);
    if (st != GSA_OK) fail(st, "repro manifest");
    manifest_text = canned;
    gsa_free_string(canned);
  } else if (!a.manifest_path.empty()) {
    manifest_text = read_file(a.manifest_path);
  } else {
    usage_fail("bench needs --manifest or --repro");
  }

  if (a.trials || a.seed || a.threads) {
    json mj;
    try {
      mj = json::parse(manifest_text);
    } catch (const json::exception& e) {
      usage_fail(std::string("manifest parse error: ") + e.what());
    }
    if (a.trials) mj["n_trials"] = *a.trials;
    if (a.seed) mj["base_seed"] = *a.seed;
    if (a.threads) mj["threads"] = *a.threads;
    manifest_text = mj.dump();
  }

  char* report = nullptr;
  char* alarms = nullptr;
  gsa_status st = gsa_bench_run_ex(manifest_text.c_str(), &report,
                                   a.alarms_csv.empty() ? nullptr : &alarms);
  if (st != GSA_OK) fail(st, "bench");
  write_file_or_stdout(a.output, report);
  gsa_free_string(report);
  if (alarms) {
    write_file_or_stdout(a.alarms_csv, alarms);
    gsa_free_string(alarms);
  }
  return 0;
}

struct OcArgs {
  std::string manifest_path;
  std::string grid = "100,1000";
  std::optional<std::size_t> trials;
  std::string output;
};

int cmd_oc_curve(const OcArgs& a) {
  std::string manifest_text = read_file(a.manifest_path);
  if (a.trials) {
    json mj;
    try {
      mj = json::parse(manifest_text);
    } catch (const json::exception& e) {
      usage_fail(std::string("manifest parse error: ") + e.what());
    }
    mj["n_trials"] = *a.trials;
    manifest_text = mj.dump();
  }
  std::vector<double> grid = parse_double_list(a.grid);
  if (grid.empty()) usage_fail("--arl0-grid must name at least one target");

  char* csv = nullptr;
  gsa_status st = gsa_oc_curve(manifest_text.c_str(), grid.data(), grid.size(), &csv);
  if (st != GSA_OK) fail(st, "oc-curve");
  write_file_or_stdout(a.output, csv);
  gsa_free_string(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-based sequential change-point detection"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Fit a detector model from in-control data");
  c->add_option("-i,--input", cal.input, "Input CSV (header `x`), or - for stdin");
  c->add_option("-o,--output", cal.output, "Model JSON output path (default stdout)");
  c->add_option("--basis", cal.basis, "auto|poly|log|frac|hermite")->capture_default_str();
  c->add_option("--order", cal.order, "Approximation order s")
      ->check(CLI::Range(1, 6))
      ->each([&](const std::string&) { cal.order_given = true; });
  c->add_option("--frac-exponents", cal.frac_exponents, "Comma list for the frac basis");
  c->add_option("--phi-max", cal.phi_max, "Basis clipping bound")->capture_default_str();
  c->add_option("--winsor", cal.winsor, "Winsorization level alpha")->capture_default_str();
  c->add_option("--mde-delta", cal.mde_delta, "Scalar MDE mean shift in sigma units");
  c->add_option("--mde-per-moment", cal.mde_per_moment, "Comma list of per-moment deltas");
  c->add_option("--mde-var-inflation", cal.mde_var_inflation, "cov1 = cov0 (1 + value)");
  c->add_option("--eps", cal.eps, "Target per-step exceedance")->capture_default_str();
  c->add_option("--threshold", cal.threshold, "pe|vp|cantelli|simulation|arl0-bisect")
      ->capture_default_str();
  c->add_option("--threshold-scale", cal.threshold_scale, "Multiplier s_h on the threshold")
      ->capture_default_str();
  c->add_option("--ar1-rho", cal.ar1_rho, "AR(1) correction for the PE threshold");
  c->add_option("--mc-blocks", cal.mc_blocks, "Simulation threshold: block count M");
  c->add_option("--mc-block-len", cal.mc_block_len, "Simulation threshold: block length B");
  c->add_option("--arl0-target", cal.arl0_target, "ARL0 bisection target");
  c->add_option("--arl0-runs", cal.arl0_runs, "ARL0 bisection runs per evaluation");
  c->add_option("--rule", cal.rule, "cusum|grsh|srp")->capture_default_str();
  c->add_flag("--select-order", cal.auto_order, "Choose s by relative J(s) gain");
  c->add_option("--order-max", cal.order_max, "Order cap for --select-order");
  c->add_option("--rel-gain", cal.rel_gain, "Gain cutoff for --select-order");
  c->add_flag("--log1p", cal.log1p, "Apply log(1+x) preprocessing (recorded in the model)");
  c->add_option("--seed", cal.seed, "Seed for simulation-based thresholds");

  DetectArgs det;
  auto* d = app.add_subcommand("detect", "Stream observations through a calibrated model");
  d->add_option("-m,--model", det.model_path, "Model JSON path")->required();
  d->add_option("-i,--input", det.input, "Observation stream (one value per line), - for stdin");
  d->add_option("--trajectory", det.trajectory, "Dump (t,lambda,stat) CSV");
  d->add_option("--rule", det.rule_override, "Override the stopping rule");
  d->add_flag("--log1p", det.log1p, "Assert the stream needs log(1+x); must match the model");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic series as CSV");
  s->add_option("--spec", sim.spec_path, "SeriesSpec JSON file");
  s->add_option("--h0", sim.h0_json, "Inline H0 distribution JSON");
  s->add_option("--change", sim.change_json, "Inline change JSON");
  s->add_option("--tau", sim.tau, "Change-point index (1-based)")->capture_default_str();
  s->add_option("-n,--n-total", sim.n_total, "Series length")->capture_default_str();
  s->add_option("--seed", sim.seed, "Seed");
  s->add_option("-o,--output", sim.output, "Output CSV path (default stdout)");

  BenchArgs ben;
  auto* b = app.add_subcommand("bench", "Run a Monte Carlo experiment manifest");
  b->add_option("--manifest", ben.manifest_path, "Manifest JSON file");
  b->add_option("--repro", ben.repro, "Canned manifest name (table-4-2)");
  b->add_option("--trials", ben.trials, "Override n_trials");
  b->add_option("--seed", ben.seed, "Override base_seed");
  b->add_option("--threads", ben.threads, "Override worker count (0 = hardware)");
  b->add_option("-o,--out", ben.output, "Report JSON path (default stdout)");
  b->add_option("--alarms-csv", ben.alarms_csv, "Write per-trial alarm indices as CSV");

  OcArgs oc;
  auto* o = app.add_subcommand("oc-curve", "ADD at matched ARL0 across a threshold sweep");
  o->add_option("--manifest", oc.manifest_path, "Manifest JSON file")->required();
  o->add_option("--arl0-grid", oc.grid, "Comma list of ARL0 targets")->capture_default_str();
  o->add_option("--trials", oc.trials, "Override n_trials");
  o->add_option("-o,--out", oc.output, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (c->parsed()) return cmd_calibrate(cal);
  if (d->parsed()) return cmd_detect(det);
  if (s->parsed()) return cmd_simulate(sim);
  if (b->parsed()) return cmd_bench(ben);
  if (o->parsed()) return cmd_oc_curve(oc);
  return 2;
}
