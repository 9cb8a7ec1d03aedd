#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace aucmeta::numerics {

struct NelderMeadOptions {
  double initial_step = 0.1;   // per-coordinate simplex offset
  double diameter_tol = 1e-6;  // stop when the simplex diameter drops below
  int max_iterations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fmin = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Standard downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Deterministic: ties in vertex ordering are broken by index.
inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t dim = x0.size();
  const std::size_t m = dim + 1;

  std::vector<std::vector<double>> simplex(m, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opt.initial_step;
  std::vector<double> fvals(m);
  for (std::size_t i = 0; i < m; ++i) fvals[i] = f(simplex[i]);

  std::vector<std::size_t> order(m);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < m; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        d = std::max(d, std::fabs(simplex[i][j] - simplex[0][j]));
    return d;
  };

  NelderMeadResult result;
  std::vector<double> centroid(dim), trial(dim);
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    sort_order();
    if (diameter() < opt.diameter_tol) {
      result.converged = true;
      break;
    }
    const std::size_t best = order[0];
    const std::size_t worst = order[m - 1];
    const std::size_t second_worst = order[m - 2];

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coef) {
      for (std::size_t j = 0; j < dim; ++j)
        trial[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
    };

    blend(-1.0);  // reflect
    double f_reflect = f(trial);
    if (f_reflect < fvals[best]) {
      std::vector<double> reflected = trial;
      blend(-2.0);  // expand
      double f_expand = f(trial);
      if (f_expand < f_reflect) {
        simplex[worst] = trial;
        fvals[worst] = f_expand;
      } else {
        simplex[worst] = reflected;
        fvals[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < fvals[second_worst]) {
      simplex[worst] = trial;
      fvals[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < fvals[worst];
    blend(outside ? -0.5 : 0.5);  // contract
    double f_contract = f(trial);
    if (f_contract < std::min(f_reflect, fvals[worst])) {
      simplex[worst] = trial;
      fvals[worst] = f_contract;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i < m; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fvals[i] = f(simplex[i]);
    }
  }

  sort_order();
  result.x = simplex[order[0]];
  result.fmin = fvals[order[0]];
  result.iterations = iter;
  return result;
}

}  // namespace aucmeta::numerics
