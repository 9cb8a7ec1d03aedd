#pragma once

#include <span>
#include <vector>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Inverse-variance pooling with tau = 0.
MetaResult fe_pool(std::span<const ValidationStudy> studies);

// Inverse-variance pooling with weights 1/(se^2 + tau^2). The method tag
// is RE_FIXED_TAU; callers that estimated tau themselves re-tag.
MetaResult re_pool(std::span<const ValidationStudy> studies, double tau);

// DerSimonian-Laird moment estimate of tau, truncated at zero.
struct TauEstimate {
  double value = 0.0;
  bool truncated = false;
};
TauEstimate dl_tau(std::span<const ValidationStudy> studies);

// Restricted maximum likelihood estimate of tau, by bounded scalar search
// on [0, 2].
double reml_tau(std::span<const ValidationStudy> studies);

// The restricted log-likelihood the REML search maximizes; exposed for
// diagnostics and oracle tests.
double restricted_loglik(std::span<const ValidationStudy> studies, double tau);

// Sidik-Jonkman two-step moment estimate; never zero on dispersed input,
// throws DegenerateData when all values coincide.
double sj_tau(std::span<const ValidationStudy> studies);

// One pooled fit per prefix 1..m of the series, in sequence order.
// Supports the frequentist methods; tau-estimating methods emit the
// k = 1 element with tau = 0 and tau_not_estimable set. fixed_tau is
// consumed only by RE_FIXED_TAU.
std::vector<MetaResult> cumulative_meta(const CpmSeries& series, Method method,
                                        double fixed_tau = 0.0);

// Shared single-fit entry used by cumulative_meta and the CV harness.
MetaResult pool_with_method(std::span<const ValidationStudy> studies,
                            Method method, double fixed_tau = 0.0);

}  // namespace aucmeta
