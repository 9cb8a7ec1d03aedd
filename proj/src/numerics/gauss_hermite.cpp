#include "aucmeta/numerics/gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "aucmeta/errors.hpp"

namespace aucmeta::numerics {
namespace {

// Newton iteration on the physicists' Hermite polynomials, largest root
// first, following the classic gauher recipe. Roots come in +/- pairs;
// only the upper half is solved.
void hermite_roots(std::size_t n, std::vector<double>& x,
                   std::vector<double>& w) {
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  const std::size_t half = (n + 1) / 2;
  x.assign(n, 0.0);
  w.assign(n, 0.0);

  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[n - 2];
    } else {
      z = 2.0 * z - x[n - i + 1];
    }

    double pp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate the orthonormal Hermite recurrence at z.
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericFailure("gauss_hermite: Newton iteration did not converge");

    x[n - 1 - i] = z;
    x[i] = -z;
    w[n - 1 - i] = 2.0 / (pp * pp);
    w[i] = w[n - 1 - i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be positive");
  GaussHermiteRule rule;
  hermite_roots(n, rule.nodes, rule.weights);
  return rule;
}

const GaussHermiteRule& default_gauss_hermite() {
  static const GaussHermiteRule rule = gauss_hermite(kDefaultQuadratureNodes);
  return rule;
}

}  // namespace aucmeta::numerics
