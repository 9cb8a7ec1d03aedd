#include <cmath>
#include <vector>

#include "aucmeta/numerics/brent.hpp"
#include "aucmeta/numerics/gauss_hermite.hpp"
#include "aucmeta/numerics/nelder_mead.hpp"
#include "aucmeta/numerics/normal.hpp"
#include "doctest.h"

using namespace aucmeta::numerics;

TEST_CASE("gauss_hermite reproduces exact Gaussian moments") {
  const auto rule = gauss_hermite(41);
  REQUIRE(rule.nodes.size() == 41);
  const double sqrt_pi = 1.7724538509055159;

  auto moment = [&](int p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], p);
    return acc;
  };

  // int x^{2k} e^{-x^2} dx = sqrt(pi) (2k-1)!! / 2^k
  CHECK(moment(0) == doctest::Approx(sqrt_pi).epsilon(1e-13));
  CHECK(moment(2) == doctest::Approx(0.8862269254527579).epsilon(1e-12));
  CHECK(moment(4) == doctest::Approx(1.329340388179137).epsilon(1e-12));
  CHECK(moment(6) == doctest::Approx(3.323350970447842).epsilon(1e-12));
  CHECK(moment(8) == doctest::Approx(11.631728396567448).epsilon(1e-12));
  CHECK(moment(10) == doctest::Approx(52.34277778455352).epsilon(1e-12));
  CHECK(moment(12) == doctest::Approx(287.88527781504433).epsilon(1e-12));
  CHECK(std::fabs(moment(1)) < 1e-13);
  CHECK(std::fabs(moment(3)) < 1e-13);

  // Symmetry and the frozen 41-node spot values.
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[40 - i]).epsilon(1e-14));
  CHECK(rule.nodes[20] == 0.0);
  CHECK(rule.nodes[40] == doctest::Approx(8.213000895598281).epsilon(1e-12));
  CHECK(rule.weights[20] == doctest::Approx(0.34482208361638944).epsilon(1e-12));
  CHECK(rule.weights[40] == doctest::Approx(4.0019596646664215e-30).epsilon(1e-9));

  // A non-polynomial integrand with a closed form:
  // int cos(x) e^{-x^2} dx = sqrt(pi) e^{-1/4}.
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * std::cos(rule.nodes[i]);
  CHECK(acc == doctest::Approx(sqrt_pi * std::exp(-0.25)).epsilon(1e-13));
}

TEST_CASE("brent_min finds scalar minima") {
  int iters = 0;
  const double x1 = brent_min(
      0.0, 2.0, [](double x) { return (x - 1.234) * (x - 1.234); }, 1e-10, 200,
      &iters);
  CHECK(x1 == doctest::Approx(1.234).epsilon(1e-8));
  CHECK(iters < 200);

  const double x2 =
      brent_min(2.0, 4.0, [](double x) { return std::cos(x); }, 1e-12, 200);
  CHECK(x2 == doctest::Approx(M_PI).epsilon(1e-9));
}

TEST_CASE("nelder_mead minimizes smooth functions") {
  auto quad = [](const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      acc += (p[i] - static_cast<double>(i)) * (p[i] - static_cast<double>(i));
    return acc;
  };
  NelderMeadOptions opt;
  opt.diameter_tol = 1e-9;
  opt.max_iterations = 5000;
  auto res = nelder_mead(quad, {5.0, -3.0, 2.0, 0.5}, opt);
  REQUIRE(res.converged);
  for (std::size_t i = 0; i < res.x.size(); ++i)
    CHECK(res.x[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-5));

  auto rosenbrock = [](const std::vector<double>& p) {
    const double a = 1.0 - p[0];
    const double b = p[1] - p[0] * p[0];
    return a * a + 100.0 * b * b;
  };
  res = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
  REQUIRE(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-12));
  CHECK(normal_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));

  for (double p : {0.001, 0.2, 0.4, 0.77, 0.999}) {
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-10));
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}
