// Small dense Nelder-Mead simplex minimizer used by the scan-and-refine
// searches. Deterministic: no randomness, ties broken by index.
#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace busemann {

struct NelderMeadResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& start, double step,
                             int max_iters, double ftol = 1e-14) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(vals[worst] - vals[best]) <= ftol * (1.0 + std::abs(vals[best]))) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[k][j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (centroid[j] - pts[worst][j]);
      return p;
    };

    auto refl = blend(1.0);
    const double frefl = f(refl);
    if (frefl < vals[best]) {
      auto exp_p = blend(2.0);
      const double fexp = f(exp_p);
      if (fexp < frefl) {
        pts[worst] = std::move(exp_p);
        vals[worst] = fexp;
      } else {
        pts[worst] = std::move(refl);
        vals[worst] = frefl;
      }
    } else if (frefl < vals[second]) {
      pts[worst] = std::move(refl);
      vals[worst] = frefl;
    } else {
      auto contr = blend(frefl < vals[worst] ? 0.5 : -0.5);
      const double fcontr = f(contr);
      if (fcontr < std::min(frefl, vals[worst])) {
        pts[worst] = std::move(contr);
        vals[worst] = fcontr;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t j = 0; j < n; ++j)
            pts[k][j] = pts[best][j] + 0.5 * (pts[k][j] - pts[best][j]);
          vals[k] = f(pts[k]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (vals[k] < vals[best]) best = k;
  return {pts[best], vals[best], iter};
}

}  // namespace busemann
