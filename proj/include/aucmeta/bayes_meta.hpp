#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Posterior moments of one CPM's pooled AUC and heterogeneity under the
// hierarchical prior, plus the spread of the posterior predictive for the
// true AUC in a new study.
struct PosteriorSummary {
  double auc_post = 0.0;
  double sd_post = 0.0;
  double tau_post_mean = 0.0;
  double tau2_post_mean = 0.0;
  double predictive_sd = 0.0;  // sqrt(sd_post^2 + tau2_post_mean)
};

enum class PriorMode { FLAT_AUC, FULL };

// The flat-AUC prior fixes the AUC hyperparameters at these constants.
inline constexpr double kFlatPriorMuAuc = 0.0;
inline constexpr double kFlatPriorSigmaAuc = 10.0;

struct FittedPrior {
  HyperParams hp;
  PriorMode mode = PriorMode::FLAT_AUC;
  double loglik = 0.0;
  std::size_t n_cpms = 0;
  std::size_t n_validations = 0;
};

struct FitOptions {
  int max_iterations = 2000;
  double diameter_tol = 1e-6;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

// Log marginal likelihood of one series under the hierarchical prior:
// the pooled AUC integrates out in closed form (the studies are jointly
// normal), the heterogeneity integral runs over Gauss-Hermite nodes in
// log tau with log-sum-exp stabilization.
double marginal_loglik_cpm(const CpmSeries& series, const HyperParams& hp);

// Posterior moments by the same quadrature.
PosteriorSummary posterior_pooled(const CpmSeries& series,
                                  const HyperParams& hp);

// Maximum marginal likelihood fit of the prior across the whole registry.
// FLAT_AUC frees (mu_tau, sigma_tau); FULL frees all four parameters.
// Sigma parameters are searched on the log scale.
FittedPrior fit_hyperparams(const std::vector<CpmSeries>& registry,
                            PriorMode mode, const FitOptions& options = {});

// Registry-wide log marginal likelihood at fixed hyperparameters
// (deterministic summation order, parallel across series).
double registry_loglik(const std::vector<CpmSeries>& registry,
                       const HyperParams& hp, std::size_t threads = 0);

std::string fitted_prior_to_json(const FittedPrior& prior);
FittedPrior fitted_prior_from_json(const std::string& text);

}  // namespace aucmeta
