#include "core/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace gsa {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_array(std::string& out, const std::vector<double>& vs) {
  out += '[';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += format_double(vs[i]);
  }
  out += ']';
}

double get_num(const json& j, const char* key) {
  if (!j.contains(key)) raise(ErrorKind::Parse, std::string("missing field: ") + key);
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) raise(ErrorKind::Parse, std::string("field is not a number: ") + key);
  return v.get<double>();
}

std::string get_str(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    raise(ErrorKind::Parse, std::string("missing string field: ") + key);
  return j.at(key).get<std::string>();
}

}  // namespace

std::string model_to_json(const CalibratedModel& model) {
  std::string out;
  out.reserve(512);
  out += "{\"schema_version\":1,\"basis\":{\"family\":\"";
  out += to_string(model.basis.family);
  out += "\",\"order\":" + std::to_string(model.basis.order);
  out += ",\"clip_bound\":" + format_double(model.basis.clip_bound);
  if (model.basis.family == BasisFamily::Frac) {
    out += ",\"frac_exponents\":";
    append_array(out, model.basis.effective_exponents());
  }
  out += "},\"k\":";
  append_array(out, model.k);
  out += ",\"k0\":" + format_double(model.k0);
  out += ",\"e0\":" + format_double(model.e0);
  out += ",\"var0\":" + format_double(model.var0);
  out += ",\"threshold\":" + format_double(model.threshold);
  out += ",\"threshold_kind\":\"";
  out += to_string(model.threshold_kind);
  out += "\",\"rule\":\"";
  out += to_string(model.rule);
  out += "\",\"log1p\":";
  out += model.log1p_input ? "true" : "false";
  out += ",\"winsor_lo\":";
  out += std::isfinite(model.winsor_lo) ? format_double(model.winsor_lo) : "null";
  out += ",\"winsor_hi\":";
  out += std::isfinite(model.winsor_hi) ? format_double(model.winsor_hi) : "null";
  out += ",\"diagnostics\":{\"cond_f\":" + format_double(model.diagnostics.cond_f);
  out += ",\"solver_level\":\"";
  out += to_string(model.diagnostics.solver_level);
  out += "\",\"j_s\":" + format_double(model.diagnostics.j_s);
  out += ",\"eta\":" + format_double(model.diagnostics.eta);
  out += ",\"ridge_lambda_used\":" + format_double(model.diagnostics.ridge_lambda_used);
  out += "}}";
  return out;
}

BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "poly") return BasisFamily::Poly;
  if (s == "log") return BasisFamily::Log;
  if (s == "frac") return BasisFamily::Frac;
  if (s == "hermite") return BasisFamily::Hermite;
  raise(ErrorKind::Parse, "unknown basis family: " + s);
}

RuleKind rule_from_string(const std::string& s) {
  if (s == "cusum") return RuleKind::Cusum;
  if (s == "grsh") return RuleKind::Grsh;
  if (s == "srp") return RuleKind::Srp;
  raise(ErrorKind::Parse, "unknown stopping rule: " + s);
}

ThresholdKind threshold_kind_from_string(const std::string& s) {
  if (s == "pe") return ThresholdKind::Pe;
  if (s == "vp") return ThresholdKind::Vp;
  if (s == "cantelli") return ThresholdKind::Cantelli;
  if (s == "simulation") return ThresholdKind::Simulation;
  if (s == "arl0") return ThresholdKind::Arl0Bisect;
  raise(ErrorKind::Parse, "unknown threshold kind: " + s);
}

BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "sign_cusum") return BaselineKind::SignCusum;
  if (s == "mad_cusum") return BaselineKind::MadCusum;
  if (s == "ewma") return BaselineKind::Ewma;
  raise(ErrorKind::Parse, "unknown baseline kind: " + s);
}

SolverLevel solver_level_from_string(const std::string& s) {
  if (s == "direct") return SolverLevel::Direct;
  if (s == "ridge") return SolverLevel::Ridge;
  if (s == "svd") return SolverLevel::Svd;
  raise(ErrorKind::Parse, "unknown solver level: " + s);
}

CalibratedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorKind::Parse, std::string("model JSON parse error: ") + e.what());
  }
  if (get_num(j, "schema_version") != 1) raise(ErrorKind::Parse, "unsupported model schema_version");

  CalibratedModel m;
  m.basis = basis_from_json(j.at("basis"));
  if (!j.contains("k") || !j.at("k").is_array()) raise(ErrorKind::Parse, "missing coefficient array k");
  m.k = j.at("k").get<std::vector<double>>();
  if (m.k.size() != static_cast<std::size_t>(m.basis.order))
    raise(ErrorKind::Parse, "coefficient count does not match the basis order");
  m.k0 = get_num(j, "k0");
  m.e0 = get_num(j, "e0");
  m.var0 = get_num(j, "var0");
  m.threshold = get_num(j, "threshold");
  m.threshold_kind = threshold_kind_from_string(get_str(j, "threshold_kind"));
  m.rule = rule_from_string(get_str(j, "rule"));
  m.log1p_input = j.value("log1p", false);
  if (j.contains("winsor_lo") && !j.at("winsor_lo").is_null()) m.winsor_lo = get_num(j, "winsor_lo");
  if (j.contains("winsor_hi") && !j.at("winsor_hi").is_null()) m.winsor_hi = get_num(j, "winsor_hi");
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    m.diagnostics.cond_f = get_num(d, "cond_f");
    m.diagnostics.solver_level = solver_level_from_string(get_str(d, "solver_level"));
    m.diagnostics.j_s = get_num(d, "j_s");
    m.diagnostics.eta = get_num(d, "eta");
    m.diagnostics.ridge_lambda_used = get_num(d, "ridge_lambda_used");
  }
  if (!(m.var0 > 0.0)) raise(ErrorKind::Parse, "model var0 must be positive");
  return m;
}

ordered_json distribution_to_json(const Distribution& d) {
  ordered_json j;
  switch (d.kind) {
    case DistKind::Gaussian:
      j["kind"] = "gaussian";
      j["mu"] = d.mu;
      j["sigma"] = d.sigma;
      break;
    case DistKind::PearsonIII:
      j["kind"] = "pearson3";
      j["skew"] = d.skew;
      break;
    case DistKind::StudentT:
      j["kind"] = "student_t";
      j["nu"] = d.nu;
      break;
    case DistKind::Pareto:
      j["kind"] = "pareto";
      j["shape"] = d.shape;
      break;
    case DistKind::LogNormal:
      j["kind"] = "lognormal";
      j["sigma_log"] = d.sigma_log;
      break;
    case DistKind::GaussianMixture: {
      j["kind"] = "mixture";
      ordered_json comps = ordered_json::array();
      for (const auto& c : d.components)
        comps.push_back({{"weight", c.weight}, {"mu", c.mu}, {"sigma", c.sigma}});
      j["components"] = comps;
      break;
    }
  }
  return j;
}

Distribution distribution_from_json(const json& j) {
  std::string kind = get_str(j, "kind");
  Distribution d;
  if (kind == "gaussian") {
    d = Distribution::gaussian(get_num(j, "mu"), get_num(j, "sigma"));
  } else if (kind == "pearson3") {
    d = Distribution::pearson3(get_num(j, "skew"));
  } else if (kind == "student_t") {
    d = Distribution::student_t(get_num(j, "nu"));
  } else if (kind == "pareto") {
    d = Distribution::pareto(get_num(j, "shape"));
  } else if (kind == "lognormal") {
    d = Distribution::lognormal(get_num(j, "sigma_log"));
  } else if (kind == "mixture") {
    if (!j.contains("components") || !j.at("components").is_array())
      raise(ErrorKind::Parse, "mixture needs a components array");
    std::vector<MixtureComponent> comps;
    for (const auto& cj : j.at("components"))
      comps.push_back({get_num(cj, "weight"), get_num(cj, "mu"), get_num(cj, "sigma")});
    d = Distribution::mixture(std::move(comps));
  } else {
    raise(ErrorKind::Parse, "unknown distribution kind: " + kind);
  }
  d.validate();
  return d;
}

ordered_json change_to_json(const Change& c) {
  ordered_json j;
  switch (c.kind) {
    case ChangeKind::MeanShift:
      j["kind"] = "mean_shift";
      j["delta"] = c.delta;
      break;
    case ChangeKind::ScaleShift:
      j["kind"] = "scale_shift";
      j["factor"] = c.factor;
      break;
    case ChangeKind::DistributionSwap:
      j["kind"] = "dist_swap";
      j["to"] = distribution_to_json(c.to);
      break;
  }
  return j;
}

Change change_from_json(const json& j) {
  std::string kind = get_str(j, "kind");
  if (kind == "mean_shift") return Change::mean_shift(get_num(j, "delta"));
  if (kind == "scale_shift") return Change::scale_shift(get_num(j, "factor"));
  if (kind == "dist_swap") {
    if (!j.contains("to")) raise(ErrorKind::Parse, "dist_swap needs a target distribution");
    return Change::swap(distribution_from_json(j.at("to")));
  }
  raise(ErrorKind::Parse, "unknown change kind: " + kind);
}

ordered_json series_spec_to_json(const SeriesSpec& s) {
  ordered_json j;
  j["h0"] = distribution_to_json(s.h0);
  j["change"] = change_to_json(s.change);
  j["tau"] = s.tau;
  j["n_total"] = s.n_total;
  j["seed"] = s.seed;
  return j;
}

SeriesSpec series_spec_from_json(const json& j) {
  SeriesSpec s;
  if (!j.contains("h0")) raise(ErrorKind::Parse, "series spec needs h0");
  s.h0 = distribution_from_json(j.at("h0"));
  if (j.contains("change")) s.change = change_from_json(j.at("change"));
  s.tau = j.value("tau", std::size_t{200});
  s.n_total = j.value("n_total", std::size_t{1000});
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

ordered_json basis_to_json(const BasisSpec& b) {
  ordered_json j;
  j["family"] = to_string(b.family);
  j["order"] = b.order;
  j["clip_bound"] = b.clip_bound;
  if (b.family == BasisFamily::Frac) j["frac_exponents"] = b.effective_exponents();
  return j;
}

BasisSpec basis_from_json(const json& j) {
  BasisSpec b;
  b.family = basis_family_from_string(get_str(j, "family"));
  b.order = j.value("order", 2);
  b.clip_bound = j.value("clip_bound", 10.0);
  if (j.contains("frac_exponents"))
    b.frac_exponents = j.at("frac_exponents").get<std::vector<double>>();
  b.validate();
  return b;
}

ordered_json mde_to_json(const MdeSpec& m) {
  ordered_json j;
  switch (m.mode) {
    case MdeMode::MeanShiftSigma:
      j["kind"] = "mean_shift_sigma";
      j["delta"] = m.delta;
      break;
    case MdeMode::PerMoment:
      j["kind"] = "per_moment";
      j["deltas"] = m.per_moment;
      break;
    case MdeMode::Swap:
      j["kind"] = "swap";
      j["to"] = distribution_to_json(m.swap_to);
      if (m.swap_n > 0) j["n"] = m.swap_n;
      break;
  }
  if (m.var_inflation != 0.0) j["var_inflation"] = m.var_inflation;
  return j;
}

MdeSpec mde_from_json(const json& j) {
  std::string kind = get_str(j, "kind");
  MdeSpec m;
  if (kind == "mean_shift_sigma") {
    m = MdeSpec::mean_shift(get_num(j, "delta"));
  } else if (kind == "per_moment") {
    if (!j.contains("deltas")) raise(ErrorKind::Parse, "per-moment MDE needs deltas");
    m = MdeSpec::per_moment_spec(j.at("deltas").get<std::vector<double>>());
  } else if (kind == "swap") {
    if (!j.contains("to")) raise(ErrorKind::Parse, "swap MDE needs a target distribution");
    m = MdeSpec::swap(distribution_from_json(j.at("to")));
    m.swap_n = j.value("n", std::size_t{0});
  } else {
    raise(ErrorKind::Parse, "unknown MDE kind: " + kind);
  }
  m.var_inflation = j.value("var_inflation", 0.0);
  m.validate();
  return m;
}

ordered_json threshold_spec_to_json(const ThresholdSpec& t) {
  ordered_json j;
  j["kind"] = to_string(t.kind);
  j["epsilon"] = t.epsilon;
  j["scale"] = t.scale;
  if (t.ar1_rho) j["ar1_rho"] = *t.ar1_rho;
  if (t.kind == ThresholdKind::Simulation) {
    j["blocks"] = t.sim.blocks;
    j["block_length"] = t.sim.block_length;
  }
  if (t.kind == ThresholdKind::Arl0Bisect) {
    j["arl0_target"] = t.arl0.target;
    j["arl0_runs"] = t.arl0.runs;
    j["arl0_max_iter"] = t.arl0.max_iter;
    j["arl0_tol"] = t.arl0.tol;
  }
  return j;
}

ThresholdSpec threshold_spec_from_json(const json& j) {
  ThresholdSpec t;
  t.kind = threshold_kind_from_string(get_str(j, "kind"));
  t.epsilon = j.value("epsilon", 0.01);
  t.scale = j.value("scale", 1.0);
  if (j.contains("ar1_rho")) t.ar1_rho = get_num(j, "ar1_rho");
  t.sim.blocks = j.value("blocks", std::size_t{50});
  t.sim.block_length = j.value("block_length", std::size_t{500});
  t.arl0.target = j.value("arl0_target", 200.0);
  t.arl0.runs = j.value("arl0_runs", std::size_t{200});
  t.arl0.max_iter = j.value("arl0_max_iter", 12);
  t.arl0.tol = j.value("arl0_tol", 0.05);
  t.validate();
  return t;
}

}  // namespace gsa
