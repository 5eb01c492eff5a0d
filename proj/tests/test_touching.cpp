#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "busemann/touching.hpp"
#include "test_util.hpp"

using namespace busemann;
using test_util::random_mat;
using test_util::random_point;

namespace {
const ObjectiveSpec ce = ObjectiveSpec::counterexample(1.0);
}

TEST_CASE("unit_direction examples and unit norm") {
  const MinorsPoint u0 = unit_direction(ce, Mat2{});
  CHECK(frob_norm(u0.hat) == 0.0);
  CHECK(u0.last == -1.0);

  // u(k I) approaches (0, 1)
  const MinorsPoint uk = unit_direction(ce, Mat2::identity() * 1e3);
  CHECK(norm5(uk - MinorsPoint{Mat2{}, 1.0}) < 0.05);

  const MinorsPoint ud = unit_direction(ce, Mat2::diag(10.0, 0.1));
  CHECK(norm5(ud - MinorsPoint{Mat2{0, 0, 0, 1}, 0.0}) < 1e-12);

  CounterRng rng(43);
  for (int i = 0; i < 10000; ++i)
    CHECK(std::abs(norm5(unit_direction(ce, random_mat(rng, 4.0))) - 1.0) <= 1e-12);
}

TEST_CASE("touching_affine touches and stays below the graph") {
  CounterRng rng(47);
  // value at touch
  for (int i = 0; i < 50; ++i) {
    const Mat2 base = random_mat(rng, 3.0);
    const AffineFunctional5 a = touching_affine(ce, base);
    CHECK(a(lift(base)) == doctest::Approx(eval_w(ce, base)).epsilon(1e-12));
    for (int j = 0; j < 2000; ++j) {
      const Mat2 xi = random_mat(rng, 4.0);
      CHECK(a(lift(xi)) <= eval_w(ce, xi) + 1e-9);
    }
  }
}

TEST_CASE("touching_affine hand values") {
  const AffineFunctional5 a0 = touching_affine(ce, Mat2{});
  CHECK(a0({Mat2{}, 0.0}) == doctest::Approx(1.0));
  const AffineFunctional5 ad = touching_affine(ce, Mat2::diag(10.0, 0.1));
  CHECK(ad({Mat2{0, 0, 0, 1}, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phi_tau_closed") {
  CounterRng rng(53);
  for (int i = 0; i < 1000; ++i) {
    const Mat2 m = random_mat(rng, 3.0);
    CHECK(phi_tau_closed(lift(m), 1.0) == doctest::Approx(eval_w(ce, m)).epsilon(1e-15));
  }
  CHECK(phi_tau_closed({Mat2{7.0, 0, 0, 0}, 1.0}, 1.0) == 0.0);  // tube centre
  const Mat2 eta{0, 0.03, -0.04, 0.05};
  CHECK(phi_tau_closed({Mat2{2.0, 0, 0, 0} + eta, 1.0}, 1.0) ==
        doctest::Approx(frob_norm(eta)).epsilon(1e-12));
}

TEST_CASE("construct_touching_sequence case selection") {
  // case (ii)
  const MinorsPoint x2{Mat2{3, 0, 0, 2}, 7.0};
  const TouchingConstruction c2 = construct_touching_sequence(x2, 1.0);
  CHECK(c2.case_tag == TouchingCase::ii);
  CHECK(c2.mu == doctest::Approx(3.5));
  CHECK(det2(c2.sequence_point(0)) == doctest::Approx(7.0).epsilon(1e-12));

  // case (iii)
  const MinorsPoint x3{Mat2{0, 1, 1, 0}, 2.0};
  const TouchingConstruction c3 = construct_touching_sequence(x3, 1.0);
  CHECK(c3.case_tag == TouchingCase::iii);
  CHECK(c3.peacock == doctest::Approx(3.0));
  for (int j = 0; j < 20; ++j)
    CHECK(det2(c3.sequence_point(j)) == doctest::Approx(2.0).epsilon(1e-9));

  // case (i), below
  const MinorsPoint x1{Mat2{}, 0.5};
  const TouchingConstruction c1 = construct_touching_sequence(x1, 1.0);
  CHECK(c1.case_tag == TouchingCase::i_below);
  CHECK(norm5(unit_direction(ce, c1.sequence_point(0)) - MinorsPoint{Mat2{}, -1.0}) == 0.0);
  CHECK(phi_tau_closed(x1, 1.0) == doctest::Approx(0.5));

  // degenerate target: phi_tau = 0, any direction suffices
  const TouchingConstruction cd = construct_touching_sequence({Mat2{4, 0, 0, 0}, 1.0}, 1.0);
  CHECK(cd.case_tag == TouchingCase::i_equal);
  CHECK(std::abs(norm5(cd.limit_direction) - 1.0) <= 1e-12);
}

TEST_CASE("schedule drives the direction angle below 1e-4") {
  CounterRng rng(59);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const MinorsPoint x = random_point(rng, 2.0);
    const MinorsPoint target{bracket(x.hat), x.last - 1.0};
    if (norm5(target) < 1e-6) continue;
    const TouchingConstruction tc = construct_touching_sequence(x, 1.0);
    double best = 1e300;
    for (int j = 0; j < TouchingConstruction::schedule_length; ++j)
      best = std::min(best, tc.angle_at(ce, j));
    CHECK(best < 1e-4);
    ++checked;
  }
  CHECK(checked > 90);
}

TEST_CASE("phi_tau_sup_numeric matches the closed form") {
  SearchBudget budget = SearchBudget::defaults();
  CounterRng rng(61);
  for (int i = 0; i < 100; ++i) {
    MinorsPoint x = random_point(rng, 2.0);
    const double n = norm5(x);
    if (n > 5.0) x = x * (5.0 / n);
    const double closed = phi_tau_closed(x, 1.0);
    const double sup = phi_tau_sup_numeric(x, ce, budget);
    CHECK(sup <= closed + 1e-9);
    CHECK(sup >= closed - 1e-3);
  }
  // tube centre
  CHECK(std::abs(phi_tau_sup_numeric({Mat2{}, 1.0}, ce, budget)) < 1e-6);
}

TEST_CASE("case (i) with X' < y converges via xi0 = 0") {
  SearchBudget budget = SearchBudget::defaults();
  const MinorsPoint x{Mat2{2.5, 0, 0, 0}, 0.25};
  CHECK(phi_tau_sup_numeric(x, ce, budget) == doctest::Approx(0.75).epsilon(1e-9));
}
