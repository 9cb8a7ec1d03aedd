#include <cmath>
#include <stdexcept>

#include "aucmeta/intervals.hpp"
#include "doctest.h"

using namespace aucmeta;

namespace {

MetaResult result(double pooled, double se, double tau, Method m = Method::RE_REML) {
  MetaResult r;
  r.pooled = pooled;
  r.pooled_se = se;
  r.tau = tau;
  r.method = m;
  r.k = 9;
  return r;
}

}  // namespace

TEST_CASE("pi_true_next reproduces the nine-validation worked example") {
  // Pooled 0.69, se 0.0332, tau 0.09: the 95% band runs 0.50 to 0.88.
  auto pi = pi_true_next(result(0.69, 0.0332, 0.09), 0.95);
  CHECK(pi.lower == doctest::Approx(0.5019805191369787).epsilon(1e-12));
  CHECK(pi.upper == doctest::Approx(0.8780194808630212).epsilon(1e-12));
  CHECK(pi.center == doctest::Approx(0.69));
  CHECK(std::round(pi.lower * 100) / 100 == doctest::Approx(0.50));
  CHECK(std::round(pi.upper * 100) / 100 == doctest::Approx(0.88));
}

TEST_CASE("pi_true_next reduces to the confidence interval at tau 0") {
  auto r = result(0.72, 0.02, 0.0, Method::FE);
  auto pi = pi_true_next(r, 0.95);
  CHECK(pi.lower == doctest::Approx(0.72 - 1.96 * 0.02).epsilon(1e-13));
  CHECK(pi.upper == doctest::Approx(0.72 + 1.96 * 0.02).epsilon(1e-13));
}

TEST_CASE("pi_true_next width tends to 2 z tau as the series grows") {
  auto pi = pi_true_next(result(0.7, 1e-6, 0.05), 0.95);
  CHECK(pi.width() == doctest::Approx(2.0 * 1.96 * 0.05).epsilon(1e-4));
}

TEST_CASE("pi_observed_next adds the next study's sampling error") {
  // Fixed-effects row: pooled 0.72, se 1/sqrt(3125), s_next 0.03.
  auto fe = result(0.72, 0.01788854381999832, 0.0, Method::FE);
  auto pi = pi_observed_next(fe, 0.03, 0.95);
  CHECK(pi.upper - pi.center == doctest::Approx(0.06845985685056609).epsilon(1e-12));

  // Random-effects row with tau fixed at 0.055.
  auto re = result(0.72, 0.01788854381999832, 0.055, Method::RE_FIXED_TAU);
  auto pi2 = pi_observed_next(re, 0.03, 0.95);
  CHECK(pi2.upper - pi2.center == doctest::Approx(0.12770118245341347).epsilon(1e-12));

  // s_next -> 0 recovers the true-AUC interval.
  auto tiny = pi_observed_next(re, 1e-9, 0.95);
  auto true_pi = pi_true_next(re, 0.95);
  CHECK(tiny.lower == doctest::Approx(true_pi.lower).epsilon(1e-12));
  CHECK(tiny.upper == doctest::Approx(true_pi.upper).epsilon(1e-12));

  CHECK_THROWS_AS(pi_observed_next(re, 0.0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(pi_observed_next(re, -0.1, 0.95), std::invalid_argument);
}

TEST_CASE("bayes intervals use posterior center and chosen spread") {
  PosteriorSummary post;
  post.auc_post = 0.71;
  post.sd_post = 0.03;
  post.tau2_post_mean = 0.0025;
  post.predictive_sd = std::sqrt(0.03 * 0.03 + 0.0025);

  auto lit = pi_true_next(post, 0.95, BayesSpread::POSTERIOR_SD);
  auto def = pi_true_next(post, 0.95, BayesSpread::PREDICTIVE);
  CHECK(lit.center == doctest::Approx(0.71));
  CHECK(lit.upper - lit.center == doctest::Approx(1.96 * 0.03).epsilon(1e-13));
  CHECK(def.upper - def.center ==
        doctest::Approx(1.96 * post.predictive_sd).epsilon(1e-13));
  // Table-literal spread nests inside the predictive spread.
  CHECK(lit.lower >= def.lower);
  CHECK(lit.upper <= def.upper);

  auto obs = pi_observed_next(post, 0.04, 0.95);
  CHECK(obs.upper - obs.center ==
        doctest::Approx(1.96 * std::sqrt(post.predictive_sd * post.predictive_sd +
                                         0.04 * 0.04)).epsilon(1e-13));
}

TEST_CASE("interval families are ordered and symmetric") {
  auto fe = result(0.7, 0.02, 0.0, Method::FE);
  auto re = result(0.7, 0.02, 0.06, Method::RE_REML);
  auto fe_pi = pi_true_next(fe), re_pi = pi_true_next(re);
  CHECK(fe_pi.lower >= re_pi.lower);
  CHECK(fe_pi.upper <= re_pi.upper);

  auto obs = pi_observed_next(re, 0.05);
  CHECK(obs.width() > re_pi.width());

  for (const auto& pi : {fe_pi, re_pi, obs}) {
    CHECK(std::fabs((pi.upper - pi.center) - (pi.center - pi.lower)) < 1e-12);
    CHECK(pi.lower <= pi.center);
    CHECK(pi.center <= pi.upper);
  }
}

TEST_CASE("raising the level scales every width by the quantile ratio") {
  auto re = result(0.7, 0.02, 0.06);
  const double ratio = z_value(0.99) / z_value(0.95);
  CHECK(pi_true_next(re, 0.99).width() ==
        doctest::Approx(ratio * pi_true_next(re, 0.95).width()).epsilon(1e-12));
  CHECK(pi_observed_next(re, 0.04, 0.99).width() ==
        doctest::Approx(ratio * pi_observed_next(re, 0.04, 0.95).width())
            .epsilon(1e-12));
}

TEST_CASE("z_value pins 1.96 at the 95% level and the exact quantile elsewhere") {
  CHECK(z_value(0.95) == 1.96);
  CHECK(z_value(0.99) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
  CHECK(z_value(0.9) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK_THROWS_AS(z_value(0.0), std::invalid_argument);
  CHECK_THROWS_AS(z_value(1.0), std::invalid_argument);
}
