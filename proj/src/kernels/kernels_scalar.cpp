#include <algorithm>
#include <cmath>
#include <limits>

#include "aucmeta/kernels/kernels.hpp"

namespace aucmeta::kernels {
namespace {

PoolStats pool_stats_scalar(const double* y, const double* s2, std::size_t n,
                            double tau2, double mu) {
  PoolStats acc;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = s2[j] + tau2;
    const double w = 1.0 / d;
    const double r = y[j] - mu;
    acc.sum_w += w;
    acc.sum_wr += r * w;
    acc.sum_wrr += r * r * w;
    acc.sum_ww += w * w;
    acc.sum_logd += std::log(d);
  }
  return acc;
}

void accumulate_node_terms_scalar(double s2, double r, const double* tau2,
                                  std::size_t n, double* acc_w, double* acc_r,
                                  double* acc_rr, double* acc_logd) {
  for (std::size_t m = 0; m < n; ++m) {
    const double d = s2 + tau2[m];
    const double w = 1.0 / d;
    acc_w[m] += w;
    acc_r[m] += r * w;
    acc_rr[m] += r * r * w;
    acc_logd[m] += std::log(d);
  }
}

void vec_exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void vec_log_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

double log_sum_exp_scalar(const double* x, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  double hi = x[0];
  for (std::size_t i = 1; i < n; ++i) hi = std::max(hi, x[i]);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(x[i] - hi);
  return hi + std::log(sum);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",           pool_stats_scalar, accumulate_node_terms_scalar,
      vec_exp_scalar,     vec_log_scalar,    log_sum_exp_scalar,
      dot_scalar,
  };
  return backend;
}

}  // namespace aucmeta::kernels
