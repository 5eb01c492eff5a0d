// The polyconvex objective family behind one plug-in interface:
// the tube-distance objective W(xi) = |([xi], det xi - y)| and the
// norm-of-minors objective f(xi) = |R(xi)|, each with its gradient and
// canonical determinant multiplier rho.
#pragma once

#include <stdexcept>
#include <string>

#include "busemann/core_linalg.hpp"

namespace busemann {

struct ZeroDenominator : std::domain_error {
  using std::domain_error::domain_error;
};

enum class ObjectiveKind { counterexample, norm_of_minors };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::counterexample;
  double y = 1.0;  // used by counterexample only, must be > 0

  static ObjectiveSpec counterexample(double y = 1.0) {
    if (!(y > 0.0)) throw std::invalid_argument("ObjectiveSpec: y must be > 0");
    return {ObjectiveKind::counterexample, y};
  }
  static ObjectiveSpec norm_of_minors() { return {ObjectiveKind::norm_of_minors, 0.0}; }
};

inline double eval_w(const ObjectiveSpec& spec, const Mat2& m) {
  if (spec.kind == ObjectiveKind::counterexample) {
    const Mat2 b = bracket(m);
    const double d = det2(m) - spec.y;
    return std::sqrt(inner_mat(b, b) + d * d);
  }
  return norm5(lift(m));
}

inline Mat2 grad_w(const ObjectiveSpec& spec, const Mat2& m) {
  const double w = eval_w(spec, m);
  if (w <= 0.0) throw ZeroDenominator("grad_w: objective vanishes at this point");
  if (spec.kind == ObjectiveKind::counterexample) {
    return (bracket(m) + (det2(m) - spec.y) * cof2(m)) * (1.0 / w);
  }
  return (m + det2(m) * cof2(m)) * (1.0 / w);
}

// The canonical determinant-slot multiplier; always in [-1, 1].
inline double rho_of(const ObjectiveSpec& spec, const Mat2& m) {
  const double w = eval_w(spec, m);
  if (w <= 0.0) throw ZeroDenominator("rho_of: objective vanishes at this point");
  if (spec.kind == ObjectiveKind::counterexample) return (det2(m) - spec.y) / w;
  return det2(m) / w;
}

// W(m+h) - W(m) - DW(m).h - rho(m) det h; nonnegative up to rounding for
// the counterexample objective.
inline double prop21_residual(const ObjectiveSpec& spec, const Mat2& m, const Mat2& h) {
  return eval_w(spec, m + h) - eval_w(spec, m) - inner_mat(grad_w(spec, m), h) -
         rho_of(spec, m) * det2(h);
}

}  // namespace busemann
