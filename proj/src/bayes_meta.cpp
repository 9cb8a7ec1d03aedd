#include "aucmeta/bayes_meta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "aucmeta/errors.hpp"
#include "aucmeta/kernels/kernels.hpp"
#include "aucmeta/numerics/gauss_hermite.hpp"
#include "aucmeta/numerics/nelder_mead.hpp"

namespace aucmeta {
namespace {

using json = nlohmann::json;

constexpr std::size_t kNodes = numerics::kDefaultQuadratureNodes;
constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kHalfLogPi = 0.5723649429247001;

struct NodeGrid {
  std::array<double, kNodes> x;     // Gauss-Hermite abscissae
  std::array<double, kNodes> logw;  // log(w_m) - log(sqrt(pi))
};

const NodeGrid& node_grid() {
  static const NodeGrid grid = [] {
    NodeGrid g;
    const auto& rule = numerics::default_gauss_hermite();
    for (std::size_t m = 0; m < kNodes; ++m) {
      g.x[m] = rule.nodes[m];
      g.logw[m] = std::log(rule.weights[m]) - kHalfLogPi;
    }
    return g;
  }();
  return grid;
}

// Per-thread scratch for one quadrature pass.
struct Workspace {
  std::array<double, kNodes> tau, tau2;
  std::array<double, kNodes> acc_w, acc_r, acc_rr, acc_logd;
  std::array<double, kNodes> logpost, scratch_a, scratch_b;
  std::vector<double> y, s2;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

// Fills the workspace with per-node joint log densities
// log[w_m p(y | tau_m, hp)] and returns it.
Workspace& eval_nodes(const CpmSeries& series, const HyperParams& hp) {
  if (series.studies.empty())
    throw std::invalid_argument("bayes_meta: empty series");
  const auto& kern = kernels::active_backend();
  const auto& grid = node_grid();
  Workspace& ws = workspace();

  const std::size_t k = series.studies.size();
  ws.y.resize(k);
  ws.s2.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    ws.y[j] = series.studies[j].auc_hat;
    ws.s2[j] = series.studies[j].se * series.studies[j].se;
  }

  for (std::size_t m = 0; m < kNodes; ++m)
    ws.scratch_a[m] = hp.mu_tau + kSqrt2 * hp.sigma_tau * grid.x[m];
  kern.vec_exp(ws.scratch_a.data(), ws.tau.data(), kNodes);
  for (std::size_t m = 0; m < kNodes; ++m) ws.tau2[m] = ws.tau[m] * ws.tau[m];

  ws.acc_w.fill(0.0);
  ws.acc_r.fill(0.0);
  ws.acc_rr.fill(0.0);
  ws.acc_logd.fill(0.0);
  for (std::size_t j = 0; j < k; ++j)
    kern.accumulate_node_terms(ws.s2[j], ws.y[j] - hp.mu_auc, ws.tau2.data(),
                               kNodes, ws.acc_w.data(), ws.acc_r.data(),
                               ws.acc_rr.data(), ws.acc_logd.data());

  const double sig2 = hp.sigma_auc * hp.sigma_auc;
  const double klog2pi = static_cast<double>(k) * kLogTwoPi;
  for (std::size_t m = 0; m < kNodes; ++m) {
    const double sa = sig2 * ws.acc_w[m];
    const double quad =
        ws.acc_rr[m] - sig2 * ws.acc_r[m] * ws.acc_r[m] / (1.0 + sa);
    ws.logpost[m] =
        grid.logw[m] -
        0.5 * (klog2pi + ws.acc_logd[m] + std::log1p(sa) + quad);
  }
  return ws;
}

std::size_t thread_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested != 0 ? requested
                                 : std::max<std::size_t>(
                                       1, std::thread::hardware_concurrency());
  return std::min(n, std::max<std::size_t>(1, jobs));
}

}  // namespace

double marginal_loglik_cpm(const CpmSeries& series, const HyperParams& hp) {
  validate(hp);
  Workspace& ws = eval_nodes(series, hp);
  const double ll =
      kernels::active_backend().log_sum_exp(ws.logpost.data(), kNodes);
  if (!std::isfinite(ll))
    throw NumericFailure("marginal_loglik_cpm: non-finite quadrature value for "
                         "series '" + series.cpm_label + "'");
  return ll;
}

PosteriorSummary posterior_pooled(const CpmSeries& series,
                                  const HyperParams& hp) {
  validate(hp);
  const auto& kern = kernels::active_backend();
  Workspace& ws = eval_nodes(series, hp);

  double hi = ws.logpost[0];
  for (std::size_t m = 1; m < kNodes; ++m) hi = std::max(hi, ws.logpost[m]);
  for (std::size_t m = 0; m < kNodes; ++m) ws.scratch_a[m] = ws.logpost[m] - hi;
  kern.vec_exp(ws.scratch_a.data(), ws.scratch_b.data(), kNodes);

  double z = 0.0;
  for (std::size_t m = 0; m < kNodes; ++m) z += ws.scratch_b[m];
  if (!(z > 0.0) || !std::isfinite(z))
    throw NumericFailure("posterior_pooled: degenerate node weights for "
                         "series '" + series.cpm_label + "'");
  for (std::size_t m = 0; m < kNodes; ++m) ws.scratch_b[m] /= z;
  const double* pi = ws.scratch_b.data();

  // Conditional posterior of the pooled AUC given tau is normal;
  // acc_r holds sum (y - mu)/d, so sum y/d = acc_r + mu * acc_w.
  const double sig2 = hp.sigma_auc * hp.sigma_auc;
  std::array<double, kNodes> mstar, second_moment;
  for (std::size_t m = 0; m < kNodes; ++m) {
    const double precision = 1.0 / sig2 + ws.acc_w[m];
    const double g = ws.acc_r[m] + hp.mu_auc * ws.acc_w[m];
    const double mean = (hp.mu_auc / sig2 + g) / precision;
    mstar[m] = mean;
    second_moment[m] = 1.0 / precision + mean * mean;
  }

  PosteriorSummary out;
  out.auc_post = kern.dot(pi, mstar.data(), kNodes);
  const double e2 = kern.dot(pi, second_moment.data(), kNodes);
  out.sd_post = std::sqrt(std::max(0.0, e2 - out.auc_post * out.auc_post));
  out.tau_post_mean = kern.dot(pi, ws.tau.data(), kNodes);
  out.tau2_post_mean = kern.dot(pi, ws.tau2.data(), kNodes);
  out.predictive_sd =
      std::sqrt(out.sd_post * out.sd_post + out.tau2_post_mean);
  if (!std::isfinite(out.auc_post) || !std::isfinite(out.sd_post) ||
      !std::isfinite(out.predictive_sd))
    throw NumericFailure("posterior_pooled: non-finite posterior moments for "
                         "series '" + series.cpm_label + "'");
  return out;
}

double registry_loglik(const std::vector<CpmSeries>& registry,
                       const HyperParams& hp, std::size_t threads) {
  if (registry.empty())
    throw std::invalid_argument("registry_loglik: empty registry");
  const std::size_t n = registry.size();
  std::vector<double> per_series(n);
  const std::size_t workers = thread_count(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      per_series[i] = marginal_loglik_cpm(registry[i], hp);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          per_series[i] = marginal_loglik_cpm(registry[i], hp);
      }));
    }
    for (auto& f : futures) f.get();
  }
  // Fixed left-to-right summation keeps results bit-identical across
  // thread counts.
  double total = 0.0;
  for (double v : per_series) total += v;
  return total;
}

FittedPrior fit_hyperparams(const std::vector<CpmSeries>& registry,
                            PriorMode mode, const FitOptions& options) {
  if (registry.empty())
    throw std::invalid_argument("fit_hyperparams: empty registry");

  std::size_t n_validations = 0;
  double y_sum = 0.0;
  bool all_single = true;
  bool all_equal = true;
  double first_y = 0.0;
  std::vector<double> per_cpm_means;
  per_cpm_means.reserve(registry.size());
  for (const auto& series : registry) {
    if (series.studies.empty())
      throw std::invalid_argument("fit_hyperparams: registry holds an empty series");
    if (series.studies.size() > 1) all_single = false;
    double m = 0.0;
    for (const auto& s : series.studies) {
      if (n_validations == 0) first_y = s.auc_hat;
      n_validations += 1;
      y_sum += s.auc_hat;
      m += s.auc_hat;
      if (s.auc_hat != first_y) all_equal = false;
    }
    per_cpm_means.push_back(m / static_cast<double>(series.studies.size()));
  }
  if (all_single && all_equal)
    throw DegenerateData("fit_hyperparams: every CPM has a single identical "
                         "validation; hyperparameters are not identifiable");

  const double y_mean = y_sum / static_cast<double>(n_validations);
  double mean_sd = 0.0;
  if (per_cpm_means.size() > 1) {
    double acc = 0.0;
    for (double m : per_cpm_means) acc += (m - y_mean) * (m - y_mean);
    mean_sd = std::sqrt(acc / static_cast<double>(per_cpm_means.size() - 1));
  }
  if (!(mean_sd > 1e-4)) mean_sd = 0.05;

  const bool full = mode == PriorMode::FULL;
  std::vector<double> start;
  if (full)
    start = {std::log(0.05), std::log(0.3), y_mean, std::log(mean_sd)};
  else
    start = {std::log(0.05), std::log(0.3)};

  auto unpack = [full](const std::vector<double>& p) {
    HyperParams hp;
    hp.mu_tau = p[0];
    hp.sigma_tau = std::exp(p[1]);
    if (full) {
      hp.mu_auc = p[2];
      hp.sigma_auc = std::exp(p[3]);
    } else {
      hp.mu_auc = kFlatPriorMuAuc;
      hp.sigma_auc = kFlatPriorSigmaAuc;
    }
    return hp;
  };

  const std::size_t threads = options.threads;
  auto objective = [&](const std::vector<double>& p) {
    return -registry_loglik(registry, unpack(p), threads);
  };

  numerics::NelderMeadOptions nm;
  nm.initial_step = 0.1;
  nm.diameter_tol = options.diameter_tol;
  nm.max_iterations = options.max_iterations;
  const auto result = numerics::nelder_mead(objective, start, nm);
  if (!result.converged) {
    std::ostringstream trace;
    trace << "fit_hyperparams: no convergence after " << result.iterations
          << " iterations (mode=" << (full ? "full" : "flat")
          << ", objective=" << result.fmin << ", point=";
    for (double v : result.x) trace << " " << v;
    trace << ")";
    throw NumericFailure(trace.str());
  }

  FittedPrior prior;
  prior.hp = unpack(result.x);
  prior.mode = mode;
  prior.loglik = -result.fmin;
  prior.n_cpms = registry.size();
  prior.n_validations = n_validations;
  return prior;
}

std::string fitted_prior_to_json(const FittedPrior& prior) {
  json doc;
  doc["mu_auc"] = prior.hp.mu_auc;
  doc["sigma_auc"] = prior.hp.sigma_auc;
  doc["mu_tau"] = prior.hp.mu_tau;
  doc["sigma_tau"] = prior.hp.sigma_tau;
  doc["mode"] = prior.mode == PriorMode::FULL ? "full" : "flat";
  doc["loglik"] = prior.loglik;
  doc["n_cpms"] = prior.n_cpms;
  doc["n_validations"] = prior.n_validations;
  return doc.dump(2) + "\n";
}

FittedPrior fitted_prior_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("prior JSON: ") + e.what());
  }
  FittedPrior prior;
  try {
    prior.hp.mu_auc = doc.at("mu_auc").get<double>();
    prior.hp.sigma_auc = doc.at("sigma_auc").get<double>();
    prior.hp.mu_tau = doc.at("mu_tau").get<double>();
    prior.hp.sigma_tau = doc.at("sigma_tau").get<double>();
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "full") prior.mode = PriorMode::FULL;
    else if (mode == "flat") prior.mode = PriorMode::FLAT_AUC;
    else throw DataError("prior JSON: unknown mode '" + mode + "'");
    prior.loglik = doc.value("loglik", 0.0);
    prior.n_cpms = doc.value("n_cpms", std::size_t{0});
    prior.n_validations = doc.value("n_validations", std::size_t{0});
  } catch (const json::exception& e) {
    throw DataError(std::string("prior JSON: ") + e.what());
  }
  validate(prior.hp);
  return prior;
}

}  // namespace aucmeta
