#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "busemann/objective.hpp"
#include "busemann/rng.hpp"
#include "test_util.hpp"

using namespace busemann;
using test_util::random_mat;

namespace {

// Central finite-difference gradient, the independent oracle for grad_w.
Mat2 fd_grad(const ObjectiveSpec& spec, const Mat2& m, double h = 1e-5) {
  auto bump = [&](int k, double d) {
    Mat2 b = m;
    switch (k) {
      case 0: b.e11 += d; break;
      case 1: b.e12 += d; break;
      case 2: b.e21 += d; break;
      case 3: b.e22 += d; break;
    }
    return eval_w(spec, b);
  };
  return {(bump(0, h) - bump(0, -h)) / (2 * h), (bump(1, h) - bump(1, -h)) / (2 * h),
          (bump(2, h) - bump(2, -h)) / (2 * h), (bump(3, h) - bump(3, -h)) / (2 * h)};
}

}  // namespace

TEST_CASE("eval_w examples") {
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CHECK(eval_w(ce, Mat2{}) == 1.0);
  CHECK(eval_w(ce, Mat2::diag(10.0, 0.1)) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(eval_w(ObjectiveSpec::norm_of_minors(), Mat2::identity()) ==
        doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("eval_w is strictly positive for the counterexample") {
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CounterRng rng(23);
  double min_seen = 1e300;
  for (int i = 0; i < 1000000; ++i)
    min_seen = std::min(min_seen, eval_w(ce, random_mat(rng, 3.0)));
  for (double t = 1.0; t <= 1e4; t *= 2.0)
    min_seen = std::min(min_seen, eval_w(ce, Mat2::diag(t, 1.0 / t)));
  CHECK(min_seen > 0.0);
}

TEST_CASE("grad_w matches central finite differences") {
  CounterRng rng(29);
  for (const auto spec : {ObjectiveSpec::counterexample(1.0), ObjectiveSpec::norm_of_minors()}) {
    for (int i = 0; i < 1000; ++i) {
      Mat2 m = random_mat(rng, 3.0);
      if (frob_norm(m) > 10.0) m = m * (10.0 / frob_norm(m));
      if (eval_w(spec, m) < 1e-3) continue;  // keep away from the nonsmooth point
      const Mat2 g = grad_w(spec, m);
      const Mat2 fd = fd_grad(spec, m);
      CHECK(frob_norm(g - fd) < 1e-6);
    }
  }
}

TEST_CASE("grad_w hand values") {
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CHECK(frob_norm(grad_w(ce, Mat2{})) == 0.0);
  const auto nm = ObjectiveSpec::norm_of_minors();
  const Mat2 g = grad_w(nm, Mat2::identity());
  CHECK(frob_norm(g - (2.0 / std::sqrt(3.0)) * Mat2::identity()) < 1e-14);
  CHECK_THROWS_AS(grad_w(nm, Mat2{}), ZeroDenominator);
}

TEST_CASE("rho_of") {
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CHECK(rho_of(ce, Mat2{}) == -1.0);
  CHECK(rho_of(ce, Mat2::diag(10.0, 0.1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rho_of(ObjectiveSpec::norm_of_minors(), Mat2::identity()) ==
        doctest::Approx(1.0 / std::sqrt(3.0)));
  CounterRng rng(31);
  for (int i = 0; i < 10000; ++i) {
    const Mat2 m = random_mat(rng, 5.0);
    CHECK(std::abs(rho_of(ce, m)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("prop21_residual is nonnegative up to rounding") {
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CHECK(prop21_residual(ce, Mat2{}, Mat2{}) == 0.0);
  CHECK(prop21_residual(ce, Mat2{}, Mat2::identity()) == doctest::Approx(1.0));
  CounterRng rng(37);
  for (int i = 0; i < 1000000; ++i) {
    const Mat2 m = random_mat(rng, 2.0);
    const Mat2 h = random_mat(rng, 2.0);
    const double tol = 1e-9 * (1.0 + inner_mat(h, h));
    CHECK(prop21_residual(ce, m, h) >= -tol);
  }
}

TEST_CASE("eval_w equals the distance from lift(m) to the tube axis line") {
  // 1-D minimization oracle over the axis parameter s.
  const auto ce = ObjectiveSpec::counterexample(1.0);
  CounterRng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Mat2 m = random_mat(rng, 3.0);
    const MinorsPoint p = lift(m);
    auto dist_at = [&](double s) { return norm5(p - MinorsPoint{Mat2{s, 0, 0, 0}, 1.0}); };
    double best = 1e300, best_s = 0.0;
    for (double s = -100.0; s <= 100.0; s += 0.01) {
      const double d = dist_at(s);
      if (d < best) best = d, best_s = s;
    }
    for (double s = best_s - 0.02; s <= best_s + 0.02; s += 1e-5)
      best = std::min(best, dist_at(s));
    CHECK(eval_w(ce, m) == doctest::Approx(best).epsilon(1e-8));
  }
}
