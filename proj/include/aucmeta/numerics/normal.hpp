#pragma once

namespace aucmeta::numerics {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile, full double precision via safeguarded Newton
// on the CDF. Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

// log of the N(mean, var) density at x.
double normal_logpdf(double x, double mean, double var);

}  // namespace aucmeta::numerics
