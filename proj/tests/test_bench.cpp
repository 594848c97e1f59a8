#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/bench.hpp"
#include "core/error.hpp"
#include "core/stats.hpp"

using namespace gsa;

namespace {

ExperimentManifest gaussian_manifest(std::size_t trials, double delta, double mde_delta) {
  ExperimentManifest m;
  m.series.h0 = Distribution::gaussian(0.0, 1.0);
  m.series.change = Change::mean_shift(delta);
  m.series.tau = 200;
  m.series.n_total = 1000;
  m.n_trials = trials;
  m.n_cal = 1000;
  m.base_seed = 11;
  m.threshold.kind = ThresholdKind::Pe;
  m.threshold.epsilon = 0.01;

  GsaConfig cfg;
  cfg.name = "poly_s1";
  cfg.basis = BasisSpec::make(BasisFamily::Poly, 1);
  cfg.mde = MdeSpec::mean_shift(mde_delta);
  m.configs.push_back(cfg);
  return m;
}

}  // namespace

TEST_CASE("accounting holds for every config") {
  auto manifest = gaussian_manifest(60, 0.5, 0.5);
  BaselineConfig sign;
  sign.name = "sign";
  sign.params.kind = BaselineKind::SignCusum;
  manifest.configs.push_back(sign);

  auto report = run_experiment(manifest);
  REQUIRE(report.configs.size() == 2);
  for (const auto& c : report.configs) {
    CHECK(c.n_detected + c.n_false + c.n_missed + c.n_failed == c.n_trials);
    CHECK(c.alarms.size() == c.n_trials);
  }
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  auto manifest = gaussian_manifest(40, 0.5, 0.5);
  manifest.threads = 1;
  auto a = report_to_json(run_experiment(manifest)).dump();
  manifest.threads = 4;
  auto b = report_to_json(run_experiment(manifest)).dump();
  manifest.threads = 3;
  auto c = report_to_json(run_experiment(manifest)).dump();
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("never-alarming and always-alarming detectors") {
  auto manifest = gaussian_manifest(50, 0.5, 0.5);
  ThresholdSpec huge;
  huge.kind = ThresholdKind::Pe;
  huge.epsilon = 0.01;
  huge.scale = 1e9;
  std::get<GsaConfig>(manifest.configs[0]).threshold = huge;

  BaselineConfig trigger;  // EWMA with a microscopic limit fires on sample 1
  trigger.name = "hair_trigger";
  trigger.params.kind = BaselineKind::Ewma;
  trigger.params.lambda_smoothing = 1.0;
  trigger.params.l_sigma = 1e-9;
  manifest.configs.push_back(trigger);

  auto report = run_experiment(manifest);
  const auto& never = report.configs[0];
  CHECK(never.far == 0.0);
  CHECK(never.det_rate == 0.0);
  CHECK(!never.add_mean.has_value());
  const auto& always = report.configs[1];
  CHECK(always.far == 1.0);
  CHECK(always.det_rate == 0.0);
}

TEST_CASE("eta diagnostic reports the relative-change parameter") {
  auto manifest = gaussian_manifest(40, 0.5, 0.5);
  auto report = run_experiment(manifest);
  REQUIRE(report.configs[0].eta_mean.has_value());
  CHECK(*report.configs[0].eta_mean == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("sign-cusum detects but trails the matched gsa detector") {
  auto manifest = gaussian_manifest(500, 1.0, 1.0);
  BaselineConfig sign;
  sign.name = "sign";
  sign.params.kind = BaselineKind::SignCusum;
  sign.params.eps = 0.005;
  manifest.configs.push_back(sign);

  auto report = run_experiment(manifest);
  const auto& gsa_cfg = report.configs[0];
  const auto& sign_cfg = report.configs[1];
  CHECK(sign_cfg.det_rate >= 0.9);
  REQUIRE(gsa_cfg.add_mean.has_value());
  REQUIRE(sign_cfg.add_mean.has_value());
  CHECK(*sign_cfg.add_mean > *gsa_cfg.add_mean);
}

TEST_CASE("ar1_wrap: identity, autocorrelation, variance preservation") {
  Rng rng(17);
  auto xs = sample(Distribution::gaussian(0.0, 1.0), 1000000, rng);
  auto same = ar1_wrap(xs, 0.0);
  CHECK(same == xs);

  auto ys = ar1_wrap(xs, 0.5);
  double m = mean(ys);
  double acc = 0.0, var_acc = 0.0;
  for (std::size_t i = 1; i < ys.size(); ++i) acc += (ys[i] - m) * (ys[i - 1] - m);
  for (double y : ys) var_acc += (y - m) * (y - m);
  double lag1 = acc / var_acc;
  CHECK(std::abs(lag1 - 0.5) < 0.02);
  CHECK(variance(ys) == doctest::Approx(variance(xs)).epsilon(0.03));
}

TEST_CASE("manifest json round-trip") {
  auto manifest = gaussian_manifest(50, 0.5, 0.5);
  BaselineConfig mad;
  mad.name = "mad";
  mad.params.kind = BaselineKind::MadCusum;
  manifest.configs.push_back(mad);
  auto j = manifest_to_json(manifest);
  auto back = manifest_from_json(j);
  CHECK(manifest_to_json(back).dump() == j.dump());
  CHECK(back.n_trials == 50);
  CHECK(back.configs.size() == 2);
}

TEST_CASE("oc-curve failures are reported per point, not fatally") {
  auto manifest = gaussian_manifest(10, 0.5, 0.5);
  // a denormal-scale per-moment MDE collapses Var[Lambda|H0] to zero
  std::get<GsaConfig>(manifest.configs[0]).mde = MdeSpec::per_moment_spec({1e-300});
  auto pts = oc_curve(manifest, {100.0});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].failed);
  CHECK(!pts[0].error.empty());
}

TEST_CASE("oc-curve hits the target arl0 and measures delay at tau=1") {
  auto manifest = gaussian_manifest(150, 1.0, 1.0);
  manifest.series.n_total = 2000;
  manifest.threshold.arl0.runs = 400;
  auto pts = oc_curve(manifest, {100.0});
  REQUIRE(pts.size() == 1);
  REQUIRE(!pts[0].failed);
  CHECK(std::abs(pts[0].arl0_achieved - 100.0) / 100.0 <= 0.10);
  REQUIRE(pts[0].add_mean.has_value());
  CHECK(*pts[0].add_mean < 30.0);
  CHECK(*pts[0].add_mean > 2.0);
}

TEST_CASE("oc-curve gaussian unit shift lands near the expected delay") {
  // delta = 1 mean shift at ARL0 = 1000: expected ADD about 10, +-25% window
  auto manifest = gaussian_manifest(200, 1.0, 1.0);
  manifest.series.n_total = 2000;
  manifest.base_seed = 77;
  manifest.threshold.arl0.runs = 400;
  auto pts = oc_curve(manifest, {1000.0});
  REQUIRE(pts.size() == 1);
  REQUIRE(!pts[0].failed);
  REQUIRE(pts[0].add_mean.has_value());
  CHECK(*pts[0].add_mean >= 6.0);
  CHECK(*pts[0].add_mean <= 15.0);
}

TEST_CASE("repro manifest is parseable and self-consistent") {
  auto m = repro_manifest_table_4_2();
  auto back = manifest_from_json(manifest_to_json(m));
  CHECK(back.configs.size() == 4);
  CHECK(back.series.h0.kind == DistKind::PearsonIII);
  CHECK(back.series.h0.skew == 10.0);
}

TEST_CASE("J diagnostic column is non-decreasing in s") {
  auto m = repro_manifest_table_4_2();
  m.n_trials = 60;
  auto report = run_experiment(m);
  double prev = 0.0;
  for (const auto& c : report.configs) {
    REQUIRE(c.j_s_mean.has_value());
    CHECK(*c.j_s_mean >= prev - 1e-9);
    prev = *c.j_s_mean;
  }
}
