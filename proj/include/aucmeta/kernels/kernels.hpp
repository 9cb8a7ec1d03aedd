#pragma once

#include <cstddef>

// Data-parallel inner loops of the engine: inverse-variance reductions
// over a series at one tau, study-major accumulation over the quadrature
// node axis, and batched exp/log/log-sum-exp. Each operation has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant selected once at startup. The variants are equivalence-tested
// against the scalar reference in tests/test_kernels.cpp.
//
// Accuracy contract for vec_exp/vec_log: relative error below 1e-13 for
// finite positive (log) or in-range (exp) inputs; exp flushes to 0 below
// -745.0 and saturates to +inf above 709.8, matching IEEE behaviour of
// the scalar routines to that tolerance.

namespace aucmeta::kernels {

// Reductions for one series at a single tau^2, on residuals r = y - mu
// with per-study variance d_j = s2_j + tau2:
//   sum_w    = sum 1/d_j
//   sum_wr   = sum r_j/d_j
//   sum_wrr  = sum r_j^2/d_j
//   sum_ww   = sum 1/d_j^2
//   sum_logd = sum log d_j
struct PoolStats {
  double sum_w = 0.0;
  double sum_wr = 0.0;
  double sum_wrr = 0.0;
  double sum_ww = 0.0;
  double sum_logd = 0.0;
};

struct Backend {
  const char* name;

  PoolStats (*pool_stats)(const double* y, const double* s2, std::size_t n,
                          double tau2, double mu);

  // Adds one study's contribution across a tau^2 node array:
  //   d = s2 + tau2[m]
  //   acc_w[m] += 1/d;  acc_r[m] += r/d;  acc_rr[m] += r*r/d;
  //   acc_logd[m] += log d
  void (*accumulate_node_terms)(double s2, double r, const double* tau2,
                                std::size_t n, double* acc_w, double* acc_r,
                                double* acc_rr, double* acc_logd);

  void (*vec_exp)(const double* x, double* out, std::size_t n);
  void (*vec_log)(const double* x, double* out, std::size_t n);

  double (*log_sum_exp)(const double* x, std::size_t n);

  double (*dot)(const double* a, const double* b, std::size_t n);
};

const Backend& scalar_backend();

// nullptr when the binary was built without AVX2 support or the CPU
// lacks AVX2/FMA.
const Backend* avx2_backend();

// The backend picked at startup: AVX2 when available, otherwise scalar.
// Environment variable AUCMETA_KERNELS=scalar|avx2 overrides.
const Backend& active_backend();

}  // namespace aucmeta::kernels
