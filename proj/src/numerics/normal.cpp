#include "aucmeta/numerics/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace aucmeta::numerics {
namespace {
constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kInvSqrtTwoPi = 0.3989422804014327;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  const double q = (p < 0.5) ? p : 1.0 - p;
  // Abramowitz & Stegun 26.2.23 start, then Newton polish.
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                     (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
  if (p < 0.5) x = -x;
  for (int i = 0; i < 4; ++i) {
    const double err = normal_cdf(x) - p;
    const double pdf = kInvSqrtTwoPi * std::exp(-0.5 * x * x);
    if (pdf <= 0.0) break;
    x -= err / pdf;
  }
  return x;
}

double normal_logpdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + r * r / var);
}

}  // namespace aucmeta::numerics
