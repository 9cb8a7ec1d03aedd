#include <cmath>
#include <random>

#include "aucmeta/core_model.hpp"
#include "aucmeta/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aucmeta;

TEST_CASE("lognormal_mean_var at the fitted priors") {
  // (-2.94, 0.27): the reference heterogeneity prior; mean rounds to 0.055.
  auto [mean1, var1] = lognormal_mean_var(-2.94, 0.27);
  CHECK(mean1 == doctest::Approx(0.05482823393035673).epsilon(1e-12));
  CHECK(std::fabs(mean1 - 0.055) < 5e-4);
  CHECK(std::sqrt(var1) == doctest::Approx(0.015).epsilon(0.01));

  auto [mean2, var2] = lognormal_mean_var(-2.89, 0.21);
  CHECK(mean2 == doctest::Approx(0.05681527859940821).epsilon(1e-12));
  CHECK(std::fabs(mean2 - 0.057) < 5e-4);
  CHECK(var2 > 0.0);

  auto [mean0, var0] = lognormal_mean_var(0.0, 0.0);
  CHECK(mean0 == doctest::Approx(1.0));
  CHECK(var0 == doctest::Approx(0.0));

  CHECK_THROWS_AS(lognormal_mean_var(std::nan(""), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(lognormal_mean_var(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("lognormal second moment agrees with Monte Carlo") {
  const double mu = -2.94, sigma = 0.27;
  auto [mean, var] = lognormal_mean_var(mu, sigma);
  const double second = mean * mean + var;
  CHECK(second ==
        doctest::Approx(std::exp(2.0 * mu + 2.0 * sigma * sigma)).epsilon(1e-12));

  std::mt19937_64 rng(1234);
  std::normal_distribution<double> gauss(mu, sigma);
  const std::size_t n = 1'000'000;
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t2 = std::exp(2.0 * gauss(rng));
    acc += t2;
    acc2 += t2 * t2;
  }
  const double mc_mean = acc / n;
  const double mc_se = std::sqrt((acc2 / n - mc_mean * mc_mean) / n);
  CHECK(std::fabs(second - mc_mean) < 3.0 * mc_se);
}

TEST_CASE("tau_bar") {
  HyperParams row1{0.0, 10.0, -2.94, 0.27};
  CHECK(tau_bar(row1) == doctest::Approx(0.0548).epsilon(0.01));

  // Near point mass at 0.05.
  HyperParams point{0.0, 10.0, std::log(0.05), 1e-9};
  CHECK(tau_bar(point) == doctest::Approx(0.05).epsilon(1e-9));

  HyperParams hp{0.0, 10.0, -3.0, 0.5};
  const double expected = 0.05641613950377735;
  CHECK(tau_bar(hp) == doctest::Approx(expected).epsilon(1e-12));

  // Monte Carlo cross-check of the same value.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(-3.0, 0.5);
  const std::size_t n = 1'000'000;
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::exp(gauss(rng));
    acc += t;
    acc2 += t * t;
  }
  const double mc_mean = acc / n;
  const double mc_se = std::sqrt((acc2 / n - mc_mean * mc_mean) / n);
  CHECK(std::fabs(expected - mc_mean) < 3.0 * mc_se);

  CHECK_THROWS_AS(tau_bar(HyperParams{0.0, -1.0, 0.0, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("loglik_series_given_tau") {
  // Single study evaluated at its own value with tau = 0: the density
  // peak log(1/(sqrt(2 pi) s)). The 0.82/0.0255 pair comes from a 95% CI
  // of [0.77, 0.87].
  const double se = 0.1 / (2.0 * 1.96);
  auto single = testutil::series("single", {{0.82, se}});
  CHECK(loglik_series_given_tau(single, 0.82, 0.0) ==
        doctest::Approx(2.749738213591744).epsilon(1e-12));
  CHECK(loglik_series_given_tau(single, 0.82, 0.0) ==
        doctest::Approx(std::log(1.0 / (std::sqrt(2.0 * M_PI) * se))).epsilon(1e-12));

  // Three studies equal the sum of three scalar normal log densities.
  auto three = testutil::series("three", {{0.64, 0.03}, {0.71, 0.05}, {0.77, 0.02}});
  const double tau = 0.07, auc = 0.7;
  double expected = 0.0;
  for (const auto& s : three.studies)
    expected += testutil::normal_logpdf(s.auc_hat, auc, s.se * s.se + tau * tau);
  CHECK(loglik_series_given_tau(three, auc, tau) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Strictly decreasing in the distance from the observed value.
  double prev = loglik_series_given_tau(single, 0.82, 0.05);
  for (double delta : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    const double up = loglik_series_given_tau(single, 0.82 + delta, 0.05);
    const double down = loglik_series_given_tau(single, 0.82 - delta, 0.05);
    CHECK(up < prev);
    CHECK(up == doctest::Approx(down).epsilon(1e-12));
    prev = up;
  }

  CHECK_THROWS_AS(loglik_series_given_tau(CpmSeries{}, 0.5, 0.0),
                  std::invalid_argument);
}

TEST_CASE("type invariants are enforced") {
  CHECK_THROWS_AS(validate(testutil::study(0.0, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(validate(testutil::study(1.0, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(validate(testutil::study(0.7, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(validate(testutil::study(0.7, -0.1)), std::invalid_argument);
  CHECK_NOTHROW(validate(testutil::study(0.7, 0.05)));

  auto ok = testutil::series("ok", {{0.7, 0.05}, {0.75, 0.04}});
  CHECK_NOTHROW(validate(ok));

  auto dup = ok;
  dup.studies[1].sequence_index = dup.studies[0].sequence_index;
  CHECK_THROWS_AS(validate(dup), std::invalid_argument);

  auto unsorted = ok;
  std::swap(unsorted.studies[0], unsorted.studies[1]);
  CHECK_THROWS_AS(validate(unsorted), std::invalid_argument);

  CpmSeries empty;
  empty.cpm_label = "empty";
  CHECK_THROWS_AS(validate(empty), std::invalid_argument);
}
