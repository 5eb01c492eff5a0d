#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "busemann/core_linalg.hpp"
#include "busemann/rng.hpp"
#include "test_util.hpp"

using namespace busemann;
using test_util::random_mat;

TEST_CASE("det2 basics") {
  CHECK(det2(Mat2::identity()) == 1.0);
  CHECK(det2(Mat2::diag(10.0, 1.0 / 10.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(det2(Mat2{}) == 0.0);
}

TEST_CASE("cof2 basics") {
  const Mat2 c = cof2(Mat2::diag(2.0, 3.0));
  CHECK(c.e11 == 3.0);
  CHECK(c.e22 == 2.0);
  CHECK(c.e12 == 0.0);
  CHECK(c.e21 == 0.0);
  const Mat2 i = cof2(Mat2::identity());
  CHECK(frob_norm(i - Mat2::identity()) == 0.0);
  const Mat2 m = cof2(Mat2{1, 2, 3, 4});
  CHECK(m.e11 == 4.0);
  CHECK(m.e12 == -3.0);
  CHECK(m.e21 == -2.0);
  CHECK(m.e22 == 1.0);
}

TEST_CASE("inner products") {
  CHECK(inner_mat(Mat2::identity(), Mat2::identity()) == 2.0);
  CHECK(inner_mat(Mat2{1, 2, 3, 4}, Mat2{0, 1, 1, 0}) == 5.0);
  CHECK(inner5({Mat2{}, 1.0}, {Mat2{}, 1.0}) == 1.0);
  CHECK(inner5({Mat2::identity(), 0.0}, {Mat2::identity(), 2.0}) == 2.0);
  CHECK(inner5({Mat2::identity(), 1.0}, {Mat2::identity(), 1.0}) == 3.0);
  CounterRng rng(7);
  const Mat2 m = random_mat(rng);
  CHECK(inner_mat(m, m) == doctest::Approx(frob_norm(m) * frob_norm(m)));
}

TEST_CASE("outer products") {
  const Mat2 e11 = outer({1, 0}, {1, 0});
  CHECK(frob_norm(e11 - Mat2{1, 0, 0, 0}) == 0.0);
  const Mat2 e22 = outer({0, 1}, {0, 1});
  CHECK(frob_norm(e22 - Mat2{0, 0, 0, 1}) == 0.0);
  const Mat2 ab = outer({1, 2}, {3, 4});
  CHECK(frob_norm(ab - Mat2{3, 4, 6, 8}) == 0.0);
  CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Mat2 o = outer({rng.normal(), rng.normal()}, {rng.normal(), rng.normal()});
    CHECK(std::abs(det2(o)) <= 1e-14 * (1.0 + inner_mat(o, o)));
  }
}

TEST_CASE("bracket zeroes the (1,1) entry and is an idempotent projection") {
  const Mat2 b = bracket(Mat2{1, 2, 3, 4});
  CHECK(frob_norm(b - Mat2{0, 2, 3, 4}) == 0.0);
  CHECK(frob_norm(bracket(outer({1, 0}, {1, 0}))) == 0.0);

  CounterRng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Mat2 a = random_mat(rng, 3.0);
    const Mat2 c = random_mat(rng, 3.0);
    CHECK(frob_norm(bracket(bracket(a)) - bracket(a)) == 0.0);
    // self-adjoint projection
    CHECK(inner_mat(bracket(a), c) ==
          doctest::Approx(inner_mat(bracket(a), bracket(c))).epsilon(1e-14));
    // linearity
    CHECK(frob_norm(bracket(a + c) - (bracket(a) + bracket(c))) == 0.0);
  }
}

TEST_CASE("lift") {
  const MinorsPoint li = lift(Mat2::identity());
  CHECK(li.last == 1.0);
  CHECK(lift(Mat2{}).last == 0.0);
  CHECK(lift(Mat2::diag(2, 3)).last == 6.0);
}

TEST_CASE("determinant expansion identity on random pairs") {
  CounterRng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const Mat2 m = random_mat(rng, 2.0);
    const Mat2 h = random_mat(rng, 2.0);
    const double lhs = det2(m + h);
    const double rhs = det2(m) + inner_mat(cof2(m), h) + det2(h);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
  }
}
