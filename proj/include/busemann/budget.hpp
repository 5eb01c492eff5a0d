// Sampling budgets shared by the scan-and-refine searches.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace busemann {

struct SearchBudget {
  int direction_samples = 2000;
  std::vector<double> radius_grid;  // ascending, nonempty
  double det_floor = 1e-6;          // quotient guard against the rank-one cone
  int refine_iters = 300;
  std::uint64_t seed = 0x42c0ffee;

  static std::vector<double> log_radii(double lo, double hi, int count) {
    std::vector<double> r(count);
    const double step = (count > 1) ? (std::log(hi) - std::log(lo)) / (count - 1) : 0.0;
    for (int i = 0; i < count; ++i) r[i] = std::exp(std::log(lo) + step * i);
    return r;
  }

  static SearchBudget defaults() {
    SearchBudget b;
    b.radius_grid = log_radii(1e-3, 1e2, 13);
    return b;
  }

  void validate() const {
    if (!(det_floor > 0.0)) throw std::invalid_argument("SearchBudget: det_floor must be > 0");
    if (radius_grid.empty()) throw std::invalid_argument("SearchBudget: radius_grid empty");
    for (std::size_t i = 1; i < radius_grid.size(); ++i)
      if (!(radius_grid[i] > radius_grid[i - 1]))
        throw std::invalid_argument("SearchBudget: radius_grid must ascend");
  }
};

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace busemann
