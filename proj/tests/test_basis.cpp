#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/basis.hpp"
#include "core/distributions.hpp"
#include "core/error.hpp"
#include "core/stats.hpp"
#include "helpers.hpp"

using namespace gsa;

TEST_CASE("poly basis evaluates monomials and clips") {
  auto spec = BasisSpec::make(BasisFamily::Poly, 3, 10.0);
  auto v = eval_basis(spec, 2.0);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 4.0);
  CHECK(v[2] == 8.0);

  auto clipped = eval_basis(BasisSpec::make(BasisFamily::Poly, 2, 10.0), 5.0);
  CHECK(clipped[0] == 5.0);
  CHECK(clipped[1] == 10.0);  // 25 clips
}

TEST_CASE("hermite basis follows the probabilists' recurrence") {
  auto v = eval_basis(BasisSpec::make(BasisFamily::Hermite, 3), 1.0);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);   // 1 - 1
  CHECK(v[2] == -2.0);  // 1 - 3

  // cross-check He_4..He_6 against the coefficient oracle
  auto spec6 = BasisSpec::make(BasisFamily::Hermite, 6, 1e18);
  for (double x : {-2.3, -0.7, 0.4, 1.9}) {
    auto got = eval_basis(spec6, x);
    for (int i = 1; i <= 6; ++i) {
      auto coeffs = testutil::he_coeffs(i);
      double want = 0.0;
      for (std::size_t p = 0; p < coeffs.size(); ++p) want += coeffs[p] * std::pow(x, p);
      CHECK(got[static_cast<std::size_t>(i - 1)] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("log basis ordering and zero handling") {
  auto spec = BasisSpec::make(BasisFamily::Log, 4, 100.0);
  double x = 2.0;
  auto v = eval_basis(spec, x);
  double l = std::log(2.0);
  CHECK(v[0] == x);
  CHECK(v[1] == doctest::Approx(l));
  CHECK(v[2] == doctest::Approx(x * l));
  CHECK(v[3] == doctest::Approx(l * l));

  // x = 0 floors |x| at 1e-12 and clips rather than diverging
  auto z = eval_basis(spec, 0.0);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == doctest::Approx(std::log(1e-12)));
  CHECK(z[2] == 0.0);
  CHECK(z[3] == 100.0);  // log(1e-12)^2 = 763.4 clips
}

TEST_CASE("frac basis uses odd sign extension and harmonic default exponents") {
  auto spec = BasisSpec::make(BasisFamily::Frac, 2);
  auto exps = spec.effective_exponents();
  CHECK(exps[0] == doctest::Approx(0.5));
  CHECK(exps[1] == doctest::Approx(1.0 / 3.0));
  auto v = eval_basis(spec, 4.0);
  CHECK(v[0] == doctest::Approx(2.0));
  auto neg = eval_basis(spec, -4.0);
  CHECK(neg[0] == doctest::Approx(-2.0));
  CHECK(eval_basis(spec, 0.0)[0] == 0.0);
}

TEST_CASE("clipping keeps every component within the bound") {
  Rng rng(5);
  for (auto fam : {BasisFamily::Poly, BasisFamily::Log, BasisFamily::Frac, BasisFamily::Hermite}) {
    auto spec = BasisSpec::make(fam, 4, 7.5);
    for (int i = 0; i < 2000; ++i) {
      double x = 50.0 * rng.normal();
      for (double v : eval_basis(spec, x)) {
        CHECK(v <= 7.5);
        CHECK(v >= -7.5);
      }
    }
  }
}

TEST_CASE("basis spec validation") {
  CHECK_THROWS_AS(BasisSpec::make(BasisFamily::Poly, 0), Error);
  CHECK_THROWS_AS(BasisSpec::make(BasisFamily::Poly, 7), Error);
  BasisSpec bad;
  bad.family = BasisFamily::Frac;
  bad.order = 2;
  bad.frac_exponents = {0.3, 0.5};  // not decreasing
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("excess kurtosis: exact, normal, gamma") {
  std::vector<double> pm{-1.0, 1.0, -1.0, 1.0};
  CHECK(excess_kurtosis(pm) == doctest::Approx(-2.0));

  Rng rng(2);
  auto zs = sample(Distribution::gaussian(0.0, 1.0), 1000000, rng);
  CHECK(std::abs(excess_kurtosis(zs)) < 0.05);

  // gamma excess kurtosis = 1.5 gamma_3^2 for the Pearson III construction
  auto gs = sample(Distribution::pearson3(2.0), 1000000, rng);
  CHECK(excess_kurtosis(gs) == doctest::Approx(6.0).epsilon(0.2 / 6.0 + 0.02));

  std::vector<double> flat{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)excess_kurtosis(flat), Error);
}

TEST_CASE("hill estimator: hand case, pareto consistency, scale invariance") {
  double e = std::exp(1.0);
  std::vector<double> xs{1.0, e, e * e, e * e * e, e * e * e * e};
  // brute-force evaluation of the formula
  double want = 1.0 / ((std::log(e * e * e * e / (e * e)) + std::log(e * e * e / (e * e))) / 2.0);
  CHECK(hill_estimator(xs, 2) == doctest::Approx(want));
  CHECK(hill_estimator(xs, 2) == doctest::Approx(2.0 / 3.0));

  Rng rng(13);
  auto ps = sample(Distribution::pareto(3.0), 100000, rng);
  auto k = static_cast<std::size_t>(std::sqrt(1e5));
  CHECK(std::abs(hill_estimator(ps, k) - 3.0) < 0.5);

  std::vector<double> scaled(ps.begin(), ps.begin() + 1000);
  double base = hill_estimator(scaled, 31);
  for (auto& v : scaled) v *= 17.5;
  CHECK(hill_estimator(scaled, 31) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("select_basis covers the three branches") {
  Rng rng(4);
  auto gauss = sample(Distribution::gaussian(0.0, 1.0), 10000, rng);
  CHECK(select_basis(gauss).family == BasisFamily::Poly);

  auto t5 = sample(Distribution::student_t(5.0), 10000, rng);
  CHECK(select_basis(t5).family == BasisFamily::Frac);

  auto par = sample(Distribution::pareto(3.0), 10000, rng);
  CHECK(select_basis(par).family == BasisFamily::Log);

  std::vector<double> tiny(gauss.begin(), gauss.begin() + 50);
  CHECK_THROWS_AS((void)select_basis(tiny), Error);
}

TEST_CASE("hermite orthonormality under the standard normal") {
  Rng rng(8);
  const std::size_t n = 1000000;
  auto spec = BasisSpec::make(BasisFamily::Hermite, 3, 1e18);
  std::vector<double> prod(n);
  double fact[4] = {1.0, 1.0, 2.0, 6.0};
  for (int i = 1; i <= 3; ++i) {
    for (int j = i; j <= 3; ++j) {
      Rng local(substream_seed(8, static_cast<std::uint64_t>(i * 10 + j)));
      for (std::size_t t = 0; t < n; ++t) {
        double x = local.normal();
        auto v = eval_basis(spec, x);
        prod[t] = v[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(j - 1)];
      }
      double want = i == j ? fact[i] : 0.0;
      double se = std::sqrt(variance(prod) / static_cast<double>(n));
      CHECK(std::abs(mean(prod) - want) < 4 * se);
    }
  }
}
