// Sampled estimation of the subgradient interval [rho_min, rho_max] and the
// extreme subgradients (DW - rho cof, rho) at a lifted point.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "busemann/budget.hpp"
#include "busemann/core_linalg.hpp"
#include "busemann/nelder_mead.hpp"
#include "busemann/objective.hpp"
#include "busemann/rng.hpp"

namespace busemann {

struct SubgradientInterval {
  double rho_min = 0.0;
  double rho_max = 0.0;
  long samples_used = 0;
  double min_abs_det_seen = std::numeric_limits<double>::infinity();
};

struct RhoEstimate {
  double value = 0.0;
  Mat2 witness;  // quotient at the witness reproduces value to 1e-12
  long samples_used = 0;
  double min_abs_det_seen = std::numeric_limits<double>::infinity();
};

namespace detail {

struct QuotientProbe {
  const ObjectiveSpec& spec;
  Mat2 m;
  double w0;
  Mat2 g0;
  double det_floor;

  double quotient(const Mat2& eta) const {
    return (eval_w(spec, m + eta) - w0 - inner_mat(g0, eta)) / det2(eta);
  }

  // Guard: |det eta| must clear det_floor * |eta|^2 with the required sign,
  // and also dominate the cancellation noise of the quotient numerator
  // (absolute rounding ~ 1e-16 * magnitude of the terms), so accepted
  // quotients carry at most ~1e-7 of rounding error.
  bool admissible(const Mat2& eta, int sign) const {
    const double d = det2(eta);
    const double n2 = inner_mat(eta, eta);
    if (!(n2 > 0.0) || !std::isfinite(d)) return false;
    if (!(sign > 0 ? d > det_floor * n2 : d < -det_floor * n2)) return false;
    const double wv = eval_w(spec, m + eta);
    if (!std::isfinite(wv)) return false;
    const double scale = 1.0 + w0 + wv + frob_norm(g0) * std::sqrt(n2);
    return std::abs(d) > 1e-8 * scale;
  }
};

// Structured family zeta(t, delta) whose lift stays close to the ray through
// u(m): [zeta] = t[m] + delta e22 and det zeta = y + t(det m - y) by choice
// of the 11 entry. At delta = 0 the lifted direction is exactly parallel to
// u(m), the quotient equals rho(m) exactly, and det(zeta - m) =
// -y(t + 1/t - 2) <= 0; small delta tilts the plane by O(delta) while
// swinging det(zeta - m) through large positive values, which is the only
// route to the infimum on the det > 0 side. Counterexample objective only.
inline std::vector<Mat2> parallel_family_etas(const ObjectiveSpec& spec, const Mat2& m) {
  std::vector<Mat2> out;
  if (spec.kind != ObjectiveKind::counterexample) return out;
  const Mat2 bm = bracket(m);
  const double detm = det2(m);
  const double detb = det2(bm);
  std::vector<double> deltas{0.0};
  for (double d = 1e-7; d <= 1.0; d *= 10.0) {
    deltas.push_back(d);
    deltas.push_back(-d);
  }
  for (double t = 0.0625; t <= 16.0; t *= 1.25) {
    for (const double delta : deltas) {
      if (delta == 0.0 && std::abs(t - 1.0) < 1e-9) continue;
      const double b22 = t * bm.e22 + delta;
      if (std::abs(b22) < 1e-12 * (1.0 + t * frob_norm(bm))) continue;
      const double zeta11 = (spec.y + t * (detm - spec.y) - t * t * detb) / b22;
      const Mat2 zeta = t * bm + Mat2{zeta11, 0, 0, delta};
      out.push_back(zeta - m);
    }
  }
  return out;
}

// sign = +1 estimates rho_max (inf over det eta > 0); sign = -1 estimates
// rho_min (sup over det eta < 0).
inline RhoEstimate estimate_rho(const ObjectiveSpec& spec, const Mat2& m,
                                const SearchBudget& budget, int sign) {
  budget.validate();
  const QuotientProbe probe{spec, m, eval_w(spec, m), grad_w(spec, m), budget.det_floor};

  // minimize sign * quotient
  struct Candidate {
    double score;
    Mat2 eta;
  };
  std::vector<Candidate> top;
  RhoEstimate est;
  est.value = std::numeric_limits<double>::infinity();  // in score units

  auto consider = [&](const Mat2& eta) {
    const double ad = std::abs(det2(eta));
    est.min_abs_det_seen = std::min(est.min_abs_det_seen, ad);
    ++est.samples_used;
    if (!probe.admissible(eta, sign)) return;
    const double score = sign * probe.quotient(eta);
    if (!std::isfinite(score)) return;
    if (score < est.value) {
      est.value = score;
      est.witness = eta;
    }
    top.push_back({score, eta});
    if (top.size() > 64) {
      std::nth_element(top.begin(), top.begin() + 10, top.end(),
                       [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
      top.resize(10);
    }
  };

  CounterRng rng(budget.seed, sign > 0 ? 0x5a01u : 0x5a02u);
  for (int i = 0; i < budget.direction_samples; ++i) {
    const Mat2 d = mat2_from_array(rng.unit4());
    for (const double r : budget.radius_grid) consider(d * r);
  }
  // Structured directions where the determinant has a definite sign.
  const double k = 0.7071067811865476;
  consider(Mat2::diag(k, k));
  consider(Mat2::diag(-k, -k));
  consider(Mat2::diag(k, -k));
  consider(Mat2::diag(-k, k));
  for (const Mat2& eta : parallel_family_etas(spec, m)) consider(eta);

  if (!std::isfinite(est.value))
    throw BudgetExhausted("estimate_rho: no sample passed the determinant guard");

  // Local refinement in (direction, log radius) from the best candidates.
  std::stable_sort(top.begin(), top.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  if (top.size() > 10) top.resize(10);
  const double big = 1e100;
  const double log_r_lo = std::log(1e-6), log_r_hi = std::log(1e9);
  auto obj = [&](const std::vector<double>& p) {
    if (!(p[4] >= log_r_lo && p[4] <= log_r_hi)) return big;
    const Mat2 d{p[0], p[1], p[2], p[3]};
    const double n = frob_norm(d);
    if (!(n > 1e-12)) return big;
    const Mat2 eta = d * (std::exp(p[4]) / n);
    if (!probe.admissible(eta, sign)) return big;
    const double score = sign * probe.quotient(eta);
    return std::isfinite(score) ? score : big;
  };
  for (const Candidate& c : top) {
    const double r = frob_norm(c.eta);
    const Mat2 d = c.eta * (1.0 / r);
    const auto res = nelder_mead(obj, {d.e11, d.e12, d.e21, d.e22, std::log(r)}, 0.3,
                                 budget.refine_iters);
    if (res.value < est.value && std::isfinite(res.value)) {
      const Mat2 dd{res.point[0], res.point[1], res.point[2], res.point[3]};
      const Mat2 eta = dd * (std::exp(res.point[4]) / frob_norm(dd));
      const double score = sign * probe.quotient(eta);
      if (probe.admissible(eta, sign) && std::isfinite(score) && score < est.value) {
        est.value = score;
        est.witness = eta;
      }
    }
  }

  est.value *= sign;  // back from score units
  return est;
}

}  // namespace detail

inline RhoEstimate estimate_rho_max(const ObjectiveSpec& spec, const Mat2& m,
                                    const SearchBudget& budget) {
  return detail::estimate_rho(spec, m, budget, +1);
}

inline RhoEstimate estimate_rho_min(const ObjectiveSpec& spec, const Mat2& m,
                                    const SearchBudget& budget) {
  return detail::estimate_rho(spec, m, budget, -1);
}

inline SubgradientInterval estimate_interval(const ObjectiveSpec& spec, const Mat2& m,
                                             const SearchBudget& budget) {
  const RhoEstimate hi = estimate_rho_max(spec, m, budget);
  const RhoEstimate lo = estimate_rho_min(spec, m, budget);
  SubgradientInterval iv;
  iv.rho_max = hi.value;
  iv.rho_min = lo.value;
  iv.samples_used = hi.samples_used + lo.samples_used;
  iv.min_abs_det_seen = std::min(hi.min_abs_det_seen, lo.min_abs_det_seen);
  return iv;
}

// Extreme elements of the subgradient set at lift(m), as R^5 vectors.
inline std::pair<MinorsPoint, MinorsPoint> subgradient_set(const ObjectiveSpec& spec,
                                                           const Mat2& m,
                                                           const SubgradientInterval& iv) {
  const Mat2 dw = grad_w(spec, m);
  const Mat2 cf = cof2(m);
  return {MinorsPoint{dw - iv.rho_min * cf, iv.rho_min},
          MinorsPoint{dw - iv.rho_max * cf, iv.rho_max}};
}

}  // namespace busemann
