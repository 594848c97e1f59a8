#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "core/distributions.hpp"
#include "gsa/gsa.h"

namespace {
std::vector<double> gaussian_sample(std::size_t n, std::uint64_t seed) {
  gsa::Rng rng(seed);
  return gsa::sample(gsa::Distribution::gaussian(0.0, 1.0), n, rng);
}
}  // namespace

TEST_CASE("calibrate -> serialize -> reload -> llr round-trip") {
  auto xs = gaussian_sample(5000, 1);
  const char* opts = R"({
    "basis": {"family": "poly", "order": 1},
    "mde": {"kind": "mean_shift_sigma", "delta": 0.5},
    "winsor": 0.0,
    "threshold": {"kind": "pe", "epsilon": 0.01}
  })";
  gsa_model* model = nullptr;
  REQUIRE(gsa_calibrate(xs.data(), xs.size(), opts, &model) == GSA_OK);

  gsa_model_info info{};
  REQUIRE(gsa_model_get_info(model, &info) == GSA_OK);
  CHECK(info.order == 1);
  CHECK(info.threshold == doctest::Approx(info.e0 + std::sqrt(info.var0 / 0.01)));

  char* json = nullptr;
  REQUIRE(gsa_model_to_json(model, &json) == GSA_OK);
  gsa_model* back = nullptr;
  REQUIRE(gsa_model_from_json(json, &back) == GSA_OK);

  double a = 0, b = 0;
  REQUIRE(gsa_model_llr(model, 1.7, &a) == GSA_OK);
  REQUIRE(gsa_model_llr(back, 1.7, &b) == GSA_OK);
  CHECK(a == b);

  double coeffs[8];
  size_t len = 8;
  REQUIRE(gsa_model_coeffs(model, coeffs, &len) == GSA_OK);
  CHECK(len == 1);

  gsa_free_string(json);
  gsa_model_free(back);
  gsa_model_free(model);
}

TEST_CASE("detector stepping semantics and error codes") {
  auto xs = gaussian_sample(2000, 2);
  gsa_model* model = nullptr;
  REQUIRE(gsa_calibrate(xs.data(), xs.size(),
                        R"({"mde":{"kind":"mean_shift_sigma","delta":1.0},
                            "basis":{"family":"poly","order":1},
                            "threshold":{"kind":"pe","epsilon":0.05}})",
                        &model) == GSA_OK);
  gsa_detector* det = nullptr;
  REQUIRE(gsa_detector_new(model, &det) == GSA_OK);

  gsa_step_result res{};
  bool alarmed = false;
  for (int i = 0; i < 2000 && !alarmed; ++i) {
    REQUIRE(gsa_detector_step(det, 5.0, &res) == GSA_OK);  // strong upward data
    alarmed = res.alarm == 1;
  }
  CHECK(alarmed);
  CHECK(res.stat > 0.0);
  CHECK(gsa_detector_step(det, 0.0, &res) == GSA_ERR_STATE);
  REQUIRE(gsa_detector_reset(det) == GSA_OK);
  CHECK(gsa_detector_step(det, 0.0, &res) == GSA_OK);
  CHECK(res.t == 1);

  gsa_detector_free(det);
  gsa_model_free(model);
}

TEST_CASE("error mapping: parse, calibration, invalid argument") {
  gsa_model* model = nullptr;
  CHECK(gsa_model_from_json("{", &model) == GSA_ERR_PARSE);
  CHECK(std::string(gsa_last_error()).size() > 0);

  auto xs = gaussian_sample(50, 3);
  CHECK(gsa_calibrate(xs.data(), xs.size(),
                      R"({"basis":{"family":"poly","order":3}})", &model) ==
        GSA_ERR_CALIBRATION);

  CHECK(gsa_calibrate(nullptr, 0, nullptr, &model) == GSA_ERR_INVALID_ARGUMENT);
  CHECK(gsa_calibrate(xs.data(), xs.size(), "{not json}", &model) == GSA_ERR_PARSE);

  // zero MDE
  CHECK(gsa_calibrate(xs.data(), xs.size(),
                      R"({"basis":{"family":"poly","order":1},
                          "mde":{"kind":"mean_shift_sigma","delta":0.0}})",
                      &model) == GSA_ERR_CALIBRATION);
}

TEST_CASE("series generation is deterministic through the C API") {
  const char* spec = R"({"h0":{"kind":"pareto","shape":3.0},
                         "change":{"kind":"scale_shift","factor":1.5},
                         "tau":10,"n_total":50,"seed":77})";
  double* a = nullptr;
  double* b = nullptr;
  size_t na = 0, nb = 0;
  REQUIRE(gsa_generate_series(spec, &a, &na) == GSA_OK);
  REQUIRE(gsa_generate_series(spec, &b, &nb) == GSA_OK);
  REQUIRE(na == 50);
  REQUIRE(nb == 50);
  CHECK(std::memcmp(a, b, na * sizeof(double)) == 0);
  gsa_free_buffer(a);
  gsa_free_buffer(b);
}

TEST_CASE("bench and repro manifests through the C API") {
  char* manifest = nullptr;
  REQUIRE(gsa_repro_manifest("table-4-2", &manifest) == GSA_OK);
  std::string text(manifest);
  gsa_free_string(manifest);
  CHECK(text.find("pearson3") != std::string::npos);

  // shrink it for a smoke run
  auto pos = text.find("\"n_trials\": 2000");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::strlen("\"n_trials\": 2000"), "\"n_trials\": 5");

  char* report = nullptr;
  REQUIRE(gsa_bench_run(text.c_str(), &report) == GSA_OK);
  std::string rep(report);
  gsa_free_string(report);
  CHECK(rep.find("\"configs\"") != std::string::npos);
  CHECK(rep.find("poly_s4") != std::string::npos);

  CHECK(gsa_repro_manifest("nope", &manifest) == GSA_ERR_INVALID_ARGUMENT);
  CHECK(gsa_bench_run("{}", &report) == GSA_ERR_PARSE);
}

TEST_CASE("log1p preprocessing is applied consistently") {
  // calibrate on log1p-transformed positive data
  gsa::Rng rng(9);
  auto raw = gsa::sample(gsa::Distribution::lognormal(0.5), 3000, rng);
  gsa_model* model = nullptr;
  REQUIRE(gsa_calibrate(raw.data(), raw.size(),
                        R"({"log1p":true,"basis":{"family":"poly","order":1},
                            "mde":{"kind":"mean_shift_sigma","delta":0.5}})",
                        &model) == GSA_OK);
  gsa_model_info info{};
  gsa_model_get_info(model, &info);
  CHECK(info.log1p_input == 1);
  double lam_bad = 0;
  CHECK(gsa_model_llr(model, -1.5, &lam_bad) == GSA_ERR_INVALID_ARGUMENT);
  double lam = 0;
  CHECK(gsa_model_llr(model, 2.0, &lam) == GSA_OK);
  gsa_model_free(model);
}

TEST_CASE("version string exists") {
  CHECK(std::string(gsa_version()).find('.') != std::string::npos);
}
