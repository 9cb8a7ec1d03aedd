#include "aucmeta/cv_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aucmeta/core_model.hpp"
#include "aucmeta/errors.hpp"
#include "aucmeta/freq_meta.hpp"

namespace aucmeta {
namespace {

bool is_bayes(Method m) {
  return m == Method::BAYES_FLAT || m == Method::BAYES_FULL;
}

CvRecord eval_one(const CpmSeries& series, std::size_t n_used,
                  const MethodSpec& spec, const std::optional<HyperParams>& hp,
                  double level) {
  const ValidationStudy& target = series.studies[n_used];
  std::span<const ValidationStudy> prefix(series.studies.data(), n_used);

  CvRecord rec;
  rec.cpm_label = series.cpm_label;
  rec.n_used = n_used;
  rec.method = spec.method;
  rec.actual = target.auc_hat;

  if (is_bayes(spec.method)) {
    CpmSeries sub;
    sub.cpm_label = series.cpm_label;
    sub.studies.assign(prefix.begin(), prefix.end());
    const PosteriorSummary post = posterior_pooled(sub, *hp);
    rec.predicted = post.auc_post;
    rec.interval = pi_observed_next(post, target.se, level, spec.spread);
  } else {
    const MetaResult fit = pool_with_method(prefix, spec.method, spec.fixed_tau);
    rec.predicted = fit.pooled;
    rec.interval = pi_observed_next(fit, target.se, level);
  }
  rec.covered = rec.interval.lower <= rec.actual && rec.actual <= rec.interval.upper;
  rec.error = rec.predicted - rec.actual;
  return rec;
}

std::vector<std::size_t> label_order(const std::vector<CpmSeries>& registry) {
  std::vector<std::size_t> idx(registry.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return registry[a].cpm_label < registry[b].cpm_label;
  });
  return idx;
}

}  // namespace

LosoResult loso_eval(const std::vector<CpmSeries>& registry, std::size_t n,
                     const MethodSpec& spec,
                     const std::optional<HyperParams>& hp, double level,
                     LosoMode mode) {
  if (n == 0) throw std::invalid_argument("loso_eval: n must be positive");
  if (is_bayes(spec.method) && !hp)
    throw std::invalid_argument("loso_eval: Bayes methods need hyperparameters");

  LosoResult out;
  for (std::size_t i : label_order(registry)) {
    const CpmSeries& series = registry[i];
    if (series.studies.size() < n + 1) {
      out.skipped_cpms += 1;
      continue;
    }
    const std::size_t n_used =
        mode == LosoMode::EXACT_N ? n : series.studies.size() - 1;
    out.records.push_back(eval_one(series, n_used, spec, hp, level));
  }
  return out;
}

LosoResult loso_eval_strict(const std::vector<CpmSeries>& registry,
                            std::size_t n, const MethodSpec& spec, double level,
                            LosoMode mode, const FitOptions& fit_options) {
  if (n == 0) throw std::invalid_argument("loso_eval_strict: n must be positive");
  const bool needs_prior = is_bayes(spec.method) || spec.method == Method::RE_FIXED_TAU;
  if (!needs_prior) return loso_eval(registry, n, spec, std::nullopt, level, mode);

  const PriorMode prior_mode =
      spec.method == Method::BAYES_FULL ? PriorMode::FULL : PriorMode::FLAT_AUC;

  LosoResult out;
  for (std::size_t i : label_order(registry)) {
    const CpmSeries& series = registry[i];
    if (series.studies.size() < n + 1) {
      out.skipped_cpms += 1;
      continue;
    }
    std::vector<CpmSeries> rest;
    rest.reserve(registry.size() - 1);
    for (const auto& other : registry)
      if (other.cpm_label != series.cpm_label) rest.push_back(other);
    const FittedPrior prior = fit_hyperparams(rest, prior_mode, fit_options);

    MethodSpec local = spec;
    std::optional<HyperParams> hp;
    if (spec.method == Method::RE_FIXED_TAU)
      local.fixed_tau = tau_bar(prior.hp);
    else
      hp = prior.hp;

    const std::size_t n_used =
        mode == LosoMode::EXACT_N ? n : series.studies.size() - 1;
    out.records.push_back(eval_one(series, n_used, local, hp, level));
  }
  return out;
}

Coverage coverage(const std::vector<CvRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("coverage: no records");
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.covered ? 1 : 0;
  Coverage cov;
  cov.n_records = records.size();
  cov.estimate = static_cast<double>(hits) / static_cast<double>(records.size());
  cov.se = std::sqrt(cov.estimate * (1.0 - cov.estimate) /
                     static_cast<double>(records.size()));
  return cov;
}

double rmse(const std::vector<CvRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("rmse: no records");
  double acc = 0.0;
  for (const auto& r : records) acc += r.error * r.error;
  return std::sqrt(acc / static_cast<double>(records.size()));
}

ValidationHistogram validation_count_histogram(
    const std::vector<CpmSeries>& registry) {
  ValidationHistogram hist;
  std::vector<double> ks;
  ks.reserve(registry.size());
  for (const auto& series : registry) {
    hist.counts[series.studies.size()] += 1;
    ks.push_back(static_cast<double>(series.studies.size()));
  }
  if (ks.empty()) {
    hist.median = hist.q1 = hist.q3 = std::nan("");
    return hist;
  }
  std::sort(ks.begin(), ks.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(ks.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= ks.size()) return ks.back();
    return ks[lo] + (h - static_cast<double>(lo)) * (ks[lo + 1] - ks[lo]);
  };
  hist.median = quantile(0.5);
  hist.q1 = quantile(0.25);
  hist.q3 = quantile(0.75);
  return hist;
}

}  // namespace aucmeta
