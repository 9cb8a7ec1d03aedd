#include "aucmeta/freq_meta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "aucmeta/errors.hpp"
#include "aucmeta/kernels/kernels.hpp"
#include "aucmeta/numerics/brent.hpp"

namespace aucmeta {
namespace {

constexpr double kRemlUpperBound = 2.0;  // tau beyond 2 is impossible on the AUC scale
constexpr double kRemlTol = 1e-8;
constexpr int kRemlMaxIter = 500;
constexpr int kRemlScanPoints = 256;

struct SeriesArrays {
  std::vector<double> y;
  std::vector<double> s2;
  double y_mean = 0.0;
};

SeriesArrays to_arrays(std::span<const ValidationStudy> studies) {
  SeriesArrays arr;
  arr.y.reserve(studies.size());
  arr.s2.reserve(studies.size());
  double sum = 0.0;
  for (const auto& s : studies) {
    arr.y.push_back(s.auc_hat);
    arr.s2.push_back(s.se * s.se);
    sum += s.auc_hat;
  }
  arr.y_mean = sum / static_cast<double>(studies.size());
  return arr;
}

// Restricted log-likelihood on precomputed arrays; residuals are taken
// about the unweighted mean to keep the quadratic form well conditioned.
double restricted_loglik_arrays(const SeriesArrays& arr, double tau) {
  const auto& kern = kernels::active_backend();
  const auto st = kern.pool_stats(arr.y.data(), arr.s2.data(), arr.y.size(),
                                  tau * tau, arr.y_mean);
  const double q = st.sum_wrr - st.sum_wr * st.sum_wr / st.sum_w;
  return -0.5 * (st.sum_logd + std::log(st.sum_w) + q);
}

}  // namespace

MetaResult re_pool(std::span<const ValidationStudy> studies, double tau) {
  if (studies.empty())
    throw std::invalid_argument("re_pool: at least one study required");
  if (!std::isfinite(tau) || tau < 0.0)
    throw std::invalid_argument("re_pool: tau must be finite and nonnegative");
  const auto arr = to_arrays(studies);
  const auto& kern = kernels::active_backend();
  const auto st = kern.pool_stats(arr.y.data(), arr.s2.data(), arr.y.size(),
                                  tau * tau, arr.y_mean);
  MetaResult out;
  out.pooled = arr.y_mean + st.sum_wr / st.sum_w;
  out.pooled_se = 1.0 / std::sqrt(st.sum_w);
  out.tau = tau;
  out.method = (tau == 0.0) ? Method::FE : Method::RE_FIXED_TAU;
  out.k = studies.size();
  return out;
}

MetaResult fe_pool(std::span<const ValidationStudy> studies) {
  if (studies.empty())
    throw std::invalid_argument("fe_pool: at least one study required");
  MetaResult out = re_pool(studies, 0.0);
  out.method = Method::FE;
  return out;
}

TauEstimate dl_tau(std::span<const ValidationStudy> studies) {
  if (studies.size() < 2)
    throw InsufficientData("dl_tau: needs at least two studies");
  const auto arr = to_arrays(studies);
  const auto& kern = kernels::active_backend();
  const auto st =
      kern.pool_stats(arr.y.data(), arr.s2.data(), arr.y.size(), 0.0, arr.y_mean);
  const double q = st.sum_wrr - st.sum_wr * st.sum_wr / st.sum_w;
  const double denom = st.sum_w - st.sum_ww / st.sum_w;
  const double k = static_cast<double>(studies.size());
  const double tau2 = (q - (k - 1.0)) / denom;
  TauEstimate est;
  if (tau2 <= 0.0) {
    est.value = 0.0;
    est.truncated = true;
  } else {
    est.value = std::sqrt(tau2);
  }
  return est;
}

double restricted_loglik(std::span<const ValidationStudy> studies, double tau) {
  if (studies.size() < 2)
    throw InsufficientData("restricted_loglik: needs at least two studies");
  return restricted_loglik_arrays(to_arrays(studies), tau);
}

double reml_tau(std::span<const ValidationStudy> studies) {
  if (studies.size() < 2)
    throw InsufficientData("reml_tau: needs at least two studies");
  const auto arr = to_arrays(studies);

  // Coarse scan brackets the global maximum, Brent refines. The scan
  // guards against parabolic steps latching onto a local shoulder.
  double best_tau = 0.0;
  double best_val = restricted_loglik_arrays(arr, 0.0);
  for (int i = 1; i <= kRemlScanPoints; ++i) {
    const double t =
        kRemlUpperBound * static_cast<double>(i) / kRemlScanPoints;
    const double v = restricted_loglik_arrays(arr, t);
    if (v > best_val) {
      best_val = v;
      best_tau = t;
    }
  }
  const double step = kRemlUpperBound / kRemlScanPoints;
  const double lo = std::max(0.0, best_tau - step);
  const double hi = std::min(kRemlUpperBound, best_tau + step);

  int iterations = 0;
  const double tau = numerics::brent_min(
      lo, hi, [&](double t) { return -restricted_loglik_arrays(arr, t); },
      kRemlTol, kRemlMaxIter, &iterations);
  if (iterations >= kRemlMaxIter)
    throw NumericFailure("reml_tau: no convergence after " +
                         std::to_string(kRemlMaxIter) + " iterations (k=" +
                         std::to_string(studies.size()) + ")");

  // Accept the boundary when it beats the interior point.
  if (restricted_loglik_arrays(arr, 0.0) >= restricted_loglik_arrays(arr, tau))
    return 0.0;
  return tau;
}

double sj_tau(std::span<const ValidationStudy> studies) {
  if (studies.size() < 2)
    throw InsufficientData("sj_tau: needs at least two studies");
  const auto arr = to_arrays(studies);
  const double k = static_cast<double>(studies.size());

  double tau0_sq = 0.0;
  for (double v : arr.y) tau0_sq += (v - arr.y_mean) * (v - arr.y_mean);
  tau0_sq /= k;
  if (tau0_sq <= 0.0)
    throw DegenerateData("sj_tau: all observed values identical; the crude "
                         "variance is zero");

  // v_j = 1/(se_j^2/tau0^2 + 1) = tau0^2 / (se_j^2 + tau0^2); the common
  // tau0^2 factor cancels in the weighted mean.
  const auto& kern = kernels::active_backend();
  const auto st = kern.pool_stats(arr.y.data(), arr.s2.data(), arr.y.size(),
                                  tau0_sq, arr.y_mean);
  const double q = st.sum_wrr - st.sum_wr * st.sum_wr / st.sum_w;
  const double tau2 = tau0_sq * q / (k - 1.0);
  return std::sqrt(tau2);
}

MetaResult pool_with_method(std::span<const ValidationStudy> studies,
                            Method method, double fixed_tau) {
  switch (method) {
    case Method::FE:
      return fe_pool(studies);
    case Method::RE_FIXED_TAU: {
      MetaResult out = re_pool(studies, fixed_tau);
      out.method = Method::RE_FIXED_TAU;
      return out;
    }
    case Method::RE_REML: {
      MetaResult out;
      if (studies.size() < 2) {
        out = re_pool(studies, 0.0);
        out.tau_not_estimable = true;
      } else {
        out = re_pool(studies, reml_tau(studies));
      }
      out.method = Method::RE_REML;
      return out;
    }
    case Method::RE_DL: {
      MetaResult out;
      if (studies.size() < 2) {
        out = re_pool(studies, 0.0);
        out.tau_not_estimable = true;
      } else {
        const auto est = dl_tau(studies);
        out = re_pool(studies, est.value);
        out.tau_truncated = est.truncated;
      }
      out.method = Method::RE_DL;
      return out;
    }
    case Method::RE_SJ: {
      MetaResult out;
      if (studies.size() < 2) {
        out = re_pool(studies, 0.0);
        out.tau_not_estimable = true;
      } else {
        double tau = 0.0;
        bool degenerate = false;
        try {
          tau = sj_tau(studies);
        } catch (const DegenerateData&) {
          degenerate = true;
        }
        out = re_pool(studies, tau);
        out.tau_not_estimable = degenerate;
      }
      out.method = Method::RE_SJ;
      return out;
    }
    case Method::BAYES_FLAT:
    case Method::BAYES_FULL:
      throw std::invalid_argument(
          "pool_with_method: Bayes methods need a prior; use posterior_pooled");
  }
  throw std::invalid_argument("pool_with_method: unknown method");
}

std::vector<MetaResult> cumulative_meta(const CpmSeries& series, Method method,
                                        double fixed_tau) {
  if (series.studies.empty())
    throw std::invalid_argument("cumulative_meta: empty series");
  std::vector<MetaResult> out;
  out.reserve(series.studies.size());
  for (std::size_t m = 1; m <= series.studies.size(); ++m) {
    out.push_back(pool_with_method(
        std::span<const ValidationStudy>(series.studies.data(), m), method,
        fixed_tau));
  }
  return out;
}

}  // namespace aucmeta
