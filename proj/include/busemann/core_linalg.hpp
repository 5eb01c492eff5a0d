// 2x2 matrix algebra and the R^5 = R^{2x2} x R geometry of the minors lift.
#pragma once

#include <array>
#include <cmath>

namespace busemann {

struct Mat2 {
  double e11 = 0.0, e12 = 0.0, e21 = 0.0, e22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }

  Mat2 operator+(const Mat2& o) const {
    return {e11 + o.e11, e12 + o.e12, e21 + o.e21, e22 + o.e22};
  }
  Mat2 operator-(const Mat2& o) const {
    return {e11 - o.e11, e12 - o.e12, e21 - o.e21, e22 - o.e22};
  }
  Mat2 operator*(double s) const { return {e11 * s, e12 * s, e21 * s, e22 * s}; }
  Mat2 operator-() const { return {-e11, -e12, -e21, -e22}; }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline double det2(const Mat2& m) { return m.e11 * m.e22 - m.e12 * m.e21; }

// cof2 is the gradient of det: det(m+h) = det m + cof2(m).h + det h.
inline Mat2 cof2(const Mat2& m) { return {m.e22, -m.e21, -m.e12, m.e11}; }

// Trace inner product tr(a^T b).
inline double inner_mat(const Mat2& a, const Mat2& b) {
  return a.e11 * b.e11 + a.e12 * b.e12 + a.e21 * b.e21 + a.e22 * b.e22;
}

inline double frob_norm(const Mat2& m) { return std::sqrt(inner_mat(m, m)); }

inline Mat2 outer(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

// Zeroes the (1,1) entry, projecting out Span{e1 (x) e1}.
inline Mat2 bracket(const Mat2& m) { return {0.0, m.e12, m.e21, m.e22}; }

// A point X = (X_hat, X_last) of R^5.
struct MinorsPoint {
  Mat2 hat;
  double last = 0.0;

  MinorsPoint operator+(const MinorsPoint& o) const { return {hat + o.hat, last + o.last}; }
  MinorsPoint operator-(const MinorsPoint& o) const { return {hat - o.hat, last - o.last}; }
  MinorsPoint operator*(double s) const { return {hat * s, last * s}; }
  MinorsPoint operator-() const { return {-hat, -last}; }
};

inline MinorsPoint operator*(double s, const MinorsPoint& p) { return p * s; }

inline double inner5(const MinorsPoint& p, const MinorsPoint& q) {
  return inner_mat(p.hat, q.hat) + p.last * q.last;
}

inline double norm5(const MinorsPoint& p) { return std::sqrt(inner5(p, p)); }

// The minors lift xi -> (xi, det xi); its image is the surface S.
inline MinorsPoint lift(const Mat2& m) { return {m, det2(m)}; }

inline Mat2 mat2_from_array(const std::array<double, 4>& a) {
  return {a[0], a[1], a[2], a[3]};
}

inline std::array<double, 4> mat2_to_array(const Mat2& m) {
  return {m.e11, m.e12, m.e21, m.e22};
}

}  // namespace busemann
