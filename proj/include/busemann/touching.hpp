// Touching hyperplanes: unit directions u(xi0), the exact touching affine
// functionals, the closed form of phi_tau, its numerical supremum, and the
// three-case touching-sequence constructor.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "busemann/budget.hpp"
#include "busemann/core_linalg.hpp"
#include "busemann/nelder_mead.hpp"
#include "busemann/objective.hpp"
#include "busemann/rng.hpp"

namespace busemann {

// Affine map X -> grad.X + offset on R^5.
struct AffineFunctional5 {
  MinorsPoint grad;
  double offset = 0.0;

  double operator()(const MinorsPoint& x) const { return inner5(grad, x) + offset; }
};

// Unit vector u(m) = ([m], det m - y) / W(m).
inline MinorsPoint unit_direction(const ObjectiveSpec& spec, const Mat2& m) {
  if (spec.kind != ObjectiveKind::counterexample)
    throw std::invalid_argument("unit_direction: counterexample objective required");
  const double w = eval_w(spec, m);
  return MinorsPoint{bracket(m), det2(m) - spec.y} * (1.0 / w);
}

// The affine functional touching the graph of W at lift(base). Built from
// the envelope gradient (DW - rho cof, rho) and cross-checked against the
// direct inner-product form X -> ([X_hat], X_last - y) . u(base); the two
// must agree to 1e-10.
inline AffineFunctional5 touching_affine(const ObjectiveSpec& spec, const Mat2& base) {
  if (spec.kind != ObjectiveKind::counterexample)
    throw std::invalid_argument("touching_affine: counterexample objective required");
  const double w = eval_w(spec, base);
  const double rho = rho_of(spec, base);
  const MinorsPoint grad_a{grad_w(spec, base) - rho * cof2(base), rho};
  const double offset_a = w - inner5(grad_a, lift(base));

  const MinorsPoint u = unit_direction(spec, base);
  const MinorsPoint grad_b{bracket(u.hat), u.last};  // u.hat already has zero (1,1)
  const double offset_b = -spec.y * u.last;

  const double scale = 1.0 + norm5(grad_a) + std::abs(offset_a);
  if (norm5(grad_a - grad_b) + std::abs(offset_a - offset_b) > 1e-10 * scale)
    throw std::runtime_error("touching_affine: construction routes disagree");
  return {grad_b, offset_b};
}

// phi_tau in closed form: |([X_hat], X_last - y)|.
inline double phi_tau_closed(const MinorsPoint& x, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("phi_tau_closed: y must be > 0");
  const Mat2 b = bracket(x.hat);
  const double d = x.last - y;
  return std::sqrt(inner_mat(b, b) + d * d);
}

enum class TouchingCase { i_below, i_above, i_equal, ii, iii };

// One of the three touching-sequence constructions. sequence_point(j) walks
// the parameter schedule (k = 2^j or nu = 2^-j); for the exactly-attained
// cases the sequence is constant.
struct TouchingConstruction {
  TouchingCase case_tag = TouchingCase::i_below;
  Mat2 base;                    // xi0
  double mu = 0.0;              // case ii / iii
  double peacock = 0.0;         // case iii: mu * nu target X' + X12*X21
  MinorsPoint limit_direction;  // unit 5-vector
  double y = 1.0;

  static constexpr int schedule_length = 41;

  Mat2 sequence_point(int j) const {
    switch (case_tag) {
      case TouchingCase::i_below:
      case TouchingCase::i_equal:
        return Mat2{};
      case TouchingCase::i_above:
        // k Q with Q = identity, k = 2^j.
        return Mat2::identity() * std::ldexp(1.0, j);
      case TouchingCase::ii:
        return base + Mat2{mu, 0, 0, 0};
      case TouchingCase::iii: {
        const double nu = std::ldexp(1.0, -j);
        const double mu_j = peacock / nu;
        return base + Mat2{mu_j, 0, 0, nu};
      }
    }
    return Mat2{};
  }

  // Angle between u(sequence_point(j)) and the limit direction.
  double angle_at(const ObjectiveSpec& spec, int j) const {
    const MinorsPoint u = unit_direction(spec, sequence_point(j));
    const double c = std::clamp(inner5(u, limit_direction), -1.0, 1.0);
    return std::acos(c);
  }
};

inline TouchingConstruction construct_touching_sequence(const MinorsPoint& x, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("construct_touching_sequence: y must be > 0");
  TouchingConstruction tc;
  tc.y = y;

  const MinorsPoint target{bracket(x.hat), x.last - y};
  const double tnorm = norm5(target);
  const Mat2 bx = bracket(x.hat);

  if (frob_norm(bx) == 0.0) {
    if (x.last < y) {
      tc.case_tag = TouchingCase::i_below;
    } else if (x.last > y) {
      tc.case_tag = TouchingCase::i_above;
    } else {
      tc.case_tag = TouchingCase::i_equal;  // degenerate target, phi_tau = 0
    }
    tc.base = Mat2{};
  } else if (bx.e22 != 0.0) {
    tc.case_tag = TouchingCase::ii;
    tc.base = bx;
    tc.mu = (x.last - det2(bx)) / bx.e22;  // det(base + mu e1(x)e1) = X' exactly
  } else {
    tc.case_tag = TouchingCase::iii;
    tc.base = bx;
    tc.peacock = x.last + x.hat.e12 * x.hat.e21;  // mu * nu along the schedule
  }

  if (tnorm > 0.0) {
    tc.limit_direction = target * (1.0 / tnorm);
  } else {
    tc.limit_direction = MinorsPoint{Mat2{}, -1.0};  // any direction suffices
  }
  return tc;
}

// Numerical supremum of ([X_hat], X_last - y) . u(xi0) over xi0, seeded with
// the touching-sequence schedule plus random samples and local refinement.
// Never exceeds the closed form (Cauchy-Schwarz).
inline double phi_tau_sup_numeric(const MinorsPoint& x, const ObjectiveSpec& spec,
                                  const SearchBudget& budget) {
  if (spec.kind != ObjectiveKind::counterexample)
    throw std::invalid_argument("phi_tau_sup_numeric: counterexample objective required");
  budget.validate();
  const MinorsPoint target{bracket(x.hat), x.last - spec.y};

  const auto value_at = [&](const Mat2& xi0) {
    return inner5(target, unit_direction(spec, xi0));
  };

  double best = value_at(Mat2{});
  Mat2 best_xi{};

  const TouchingConstruction tc = construct_touching_sequence(x, spec.y);
  for (int j = 0; j < TouchingConstruction::schedule_length; ++j) {
    const Mat2 xi = tc.sequence_point(j);
    const double v = value_at(xi);
    if (v > best) {
      best = v;
      best_xi = xi;
    }
  }

  CounterRng rng(budget.seed, 0x7au);
  const int dirs = std::max(1, budget.direction_samples / 10);
  for (int i = 0; i < dirs; ++i) {
    const Mat2 d = mat2_from_array(rng.unit4());
    for (const double r : budget.radius_grid) {
      const Mat2 xi = d * r;
      const double v = value_at(xi);
      if (v > best) {
        best = v;
        best_xi = xi;
      }
    }
  }

  auto neg = [&](const std::vector<double>& p) {
    return -value_at(Mat2{p[0], p[1], p[2], p[3]});
  };
  const auto res = nelder_mead(neg, {best_xi.e11, best_xi.e12, best_xi.e21, best_xi.e22},
                               0.25 * (1.0 + frob_norm(best_xi)), budget.refine_iters);
  return std::max(best, -res.value);
}

}  // namespace busemann
