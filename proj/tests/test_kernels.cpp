#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "aucmeta/kernels/kernels.hpp"
#include "doctest.h"

using aucmeta::kernels::Backend;
using aucmeta::kernels::PoolStats;

namespace {

std::vector<const Backend*> all_backends() {
  std::vector<const Backend*> list{&aucmeta::kernels::scalar_backend()};
  if (const Backend* avx2 = aucmeta::kernels::avx2_backend();
      avx2 != nullptr && &aucmeta::kernels::active_backend() == avx2)
    list.push_back(avx2);
  return list;
}

bool close_rel(double a, double b, double rel) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) == std::isnan(b);
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("vec_exp matches std::exp across the full range") {
  std::mt19937_64 rng(7);
  std::vector<double> xs;
  std::uniform_real_distribution<double> wide(-745.0, 709.0), mid(-40.0, 40.0);
  for (int i = 0; i < 4000; ++i) xs.push_back(wide(rng));
  for (int i = 0; i < 4000; ++i) xs.push_back(mid(rng));
  for (double v : {0.0, -0.0, 1.0, -1.0, 709.7, -745.0, -746.0, 710.0, 1000.0,
                   -1000.0, std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::quiet_NaN()})
    xs.push_back(v);

  for (const Backend* b : all_backends()) {
    CAPTURE(b->name);
    std::vector<double> out(xs.size());
    b->vec_exp(xs.data(), out.data(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double expected = std::exp(xs[i]);
      CAPTURE(xs[i]);
      // Subnormal results may flush; treat anything below the normal
      // range as equivalent to zero for the comparison.
      if (expected != 0.0 && std::fabs(expected) < 1e-300) continue;
      CHECK(close_rel(out[i], expected, 1e-13));
    }
  }
}

TEST_CASE("vec_log matches std::log including edge cases") {
  std::mt19937_64 rng(11);
  std::vector<double> xs;
  std::uniform_real_distribution<double> expo(-300.0, 300.0), near1(-1e-6, 1e-6);
  for (int i = 0; i < 4000; ++i) xs.push_back(std::pow(10.0, expo(rng)));
  for (int i = 0; i < 2000; ++i) xs.push_back(1.0 + near1(rng));
  for (double v : {1.0, 2.0, 0.5, 1e-308, 5e-320, 2.2250738585072014e-308,
                   1.7e308, 0.0, -1.0,
                   std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::quiet_NaN()})
    xs.push_back(v);

  for (const Backend* b : all_backends()) {
    CAPTURE(b->name);
    std::vector<double> out(xs.size());
    b->vec_log(xs.data(), out.data(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CAPTURE(xs[i]);
      CHECK(close_rel(out[i], std::log(xs[i]), 1e-13));
    }
  }
}

TEST_CASE("pool_stats backends agree with each other and a plain loop") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.4, 0.95), se(0.005, 0.2),
      tau(0.0, 0.3);
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                        std::size_t{4}, std::size_t{5}, std::size_t{9},
                        std::size_t{41}, std::size_t{100}, std::size_t{997}}) {
    std::vector<double> y(n), s2(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = unif(rng);
      const double s = se(rng);
      s2[i] = s * s;
    }
    const double t2 = tau(rng) * tau(rng);
    const double mu = 0.7;

    PoolStats ref;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = s2[i] + t2;
      const double r = y[i] - mu;
      ref.sum_w += 1.0 / d;
      ref.sum_wr += r / d;
      ref.sum_wrr += r * r / d;
      ref.sum_ww += 1.0 / (d * d);
      ref.sum_logd += std::log(d);
    }

    for (const Backend* b : all_backends()) {
      CAPTURE(b->name);
      CAPTURE(n);
      const PoolStats got = b->pool_stats(y.data(), s2.data(), n, t2, mu);
      CHECK(close_rel(got.sum_w, ref.sum_w, 1e-12));
      CHECK(close_rel(got.sum_wr, ref.sum_wr, 1e-12));
      CHECK(close_rel(got.sum_wrr, ref.sum_wrr, 1e-12));
      CHECK(close_rel(got.sum_ww, ref.sum_ww, 1e-12));
      CHECK(close_rel(got.sum_logd, ref.sum_logd, 1e-12));
    }
  }
}

TEST_CASE("accumulate_node_terms backends agree") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tau(1e-4, 1.5);
  for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{41},
                        std::size_t{63}}) {
    std::vector<double> tau2(n);
    for (auto& t : tau2) {
      const double v = tau(rng);
      t = v * v;
    }
    std::vector<double> w_a(n, 0.1), r_a(n, 0.2), rr_a(n, 0.3), ld_a(n, 0.4);
    auto w_b = w_a, r_b = r_a, rr_b = rr_a, ld_b = ld_a;

    const double s2 = 0.0009, r = -0.12;
    aucmeta::kernels::scalar_backend().accumulate_node_terms(
        s2, r, tau2.data(), n, w_a.data(), r_a.data(), rr_a.data(), ld_a.data());
    for (const Backend* b : all_backends()) {
      if (b == &aucmeta::kernels::scalar_backend()) continue;
      auto w = w_b, rx = r_b, rr = rr_b, ld = ld_b;
      b->accumulate_node_terms(s2, r, tau2.data(), n, w.data(), rx.data(),
                               rr.data(), ld.data());
      for (std::size_t m = 0; m < n; ++m) {
        CHECK(close_rel(w[m], w_a[m], 1e-13));
        CHECK(close_rel(rx[m], r_a[m], 1e-13));
        CHECK(close_rel(rr[m], rr_a[m], 1e-13));
        CHECK(close_rel(ld[m], ld_a[m], 1e-13));
      }
    }
  }
}

TEST_CASE("log_sum_exp is stable and consistent across backends") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (double shift : {0.0, -500.0, 500.0, -1e5}) {
    for (std::size_t n : {std::size_t{1}, std::size_t{5}, std::size_t{41},
                          std::size_t{128}}) {
      std::vector<double> x(n);
      for (auto& v : x) v = unif(rng) + shift;
      // Long-double reference.
      long double hi = x[0];
      for (double v : x) hi = std::max<long double>(hi, v);
      long double sum = 0.0L;
      for (double v : x) sum += std::exp(static_cast<long double>(v) - hi);
      const double expected = static_cast<double>(hi + std::log(sum));
      for (const Backend* b : all_backends()) {
        CAPTURE(b->name);
        CHECK(close_rel(b->log_sum_exp(x.data(), n), expected, 1e-13));
      }
    }
  }
  // All -inf stays -inf.
  std::vector<double> ninf(4, -std::numeric_limits<double>::infinity());
  for (const Backend* b : all_backends())
    CHECK(b->log_sum_exp(ninf.data(), ninf.size()) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("dot backends agree") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{7},
                        std::size_t{41}, std::size_t{1024}}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = unif(rng);
      b[i] = unif(rng);
    }
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
    for (const Backend* be : all_backends())
      CHECK(close_rel(be->dot(a.data(), b.data(), n), ref, 1e-12));
  }
}

TEST_CASE("kernel results are bitwise reproducible run to run") {
  std::vector<double> x{0.1, -3.5, 2.25, 700.0, -700.0, 41.5, -0.25, 9.0};
  for (const Backend* b : all_backends()) {
    std::vector<double> out1(x.size()), out2(x.size());
    b->vec_exp(x.data(), out1.data(), x.size());
    b->vec_exp(x.data(), out2.data(), x.size());
    CHECK(out1 == out2);
    CHECK(b->log_sum_exp(x.data(), x.size()) == b->log_sum_exp(x.data(), x.size()));
  }
}
