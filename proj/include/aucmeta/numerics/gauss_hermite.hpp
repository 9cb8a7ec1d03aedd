#pragma once

#include <cstddef>
#include <vector>

namespace aucmeta::numerics {

// Nodes and weights of the n-point Gauss-Hermite rule with weight
// function exp(-x^2):  integral f(x) exp(-x^2) dx ~= sum w_i f(x_i).
// Nodes are ascending; weights are positive and sum to sqrt(pi).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t n);

// The rule the Bayes engine uses throughout.
inline constexpr std::size_t kDefaultQuadratureNodes = 41;

const GaussHermiteRule& default_gauss_hermite();

}  // namespace aucmeta::numerics
