#pragma once

#include <utility>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Mean and variance of a lognormal variable whose log has the given
// mean and standard deviation.
std::pair<double, double> lognormal_mean_var(double mu_tau, double sigma_tau);

// Mean heterogeneity implied by the fitted prior: exp(mu_tau + sigma_tau^2/2).
double tau_bar(const HyperParams& hp);

// Log-likelihood of one series given its pooled mean and heterogeneity:
// each observed AUC is normal with mean auc_i and variance se^2 + tau^2
// (the latent per-study level integrates out analytically).
double loglik_series_given_tau(const CpmSeries& series, double auc_i,
                               double tau);

}  // namespace aucmeta
