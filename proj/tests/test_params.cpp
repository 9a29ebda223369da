#include "doctest.h"

#include <cmath>

#include "wetting/bkw.hpp"
#include "wetting/params.hpp"

using namespace wetting;

namespace {

double bisect(double lo, double hi, auto f) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("q=25 closed forms") {
  const CriticalParams cp = params_from_q(25);
  CHECK(cp.p == doctest::Approx(5.0 / 6).epsilon(1e-14));
  CHECK(cp.lambda == doctest::Approx(std::log((5 + std::sqrt(21.0)) / 2)).epsilon(1e-13));
  CHECK(cp.lambda == doctest::Approx(1.566799).epsilon(1e-6));
  CHECK(cp.c == doctest::Approx(std::sqrt(7.0)).epsilon(1e-13));
  CHECK(cp.c_b == doctest::Approx(2.188901).epsilon(1e-6));
  CHECK(cp.c * cp.c == doctest::Approx(std::sqrt(25.0) + 2).epsilon(1e-13));
  CHECK(std::exp(cp.lambda) + std::exp(-cp.lambda) == doctest::Approx(5).epsilon(1e-13));
}

TEST_CASE("q=25 J and U by root finding") {
  const CriticalParams cp = params_from_q(25);
  const double J = bisect(1e-6, 3.0, [](double j) { return 1 / std::tanh(2 * j) - std::sqrt(7.0); });
  const double U = bisect(-3.0, 3.0, [J](double u) { return std::sinh(2 * J) - std::exp(-2 * u); });
  // the printed reference values 0.198874, 0.447857 are off in the fifth digit
  CHECK(J == doctest::Approx(0.198874).epsilon(5e-4));
  CHECK(U == doctest::Approx(0.447857).epsilon(5e-4));
  CHECK(std::sinh(2 * J) == doctest::Approx(1 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(cp.J == doctest::Approx(J).epsilon(1e-10));
  CHECK(cp.U == doctest::Approx(U).epsilon(1e-10));
  CHECK(cp.U > cp.J);
}

TEST_CASE("relations hold across q") {
  for (double q : {4.5, 6.0, 9.0, 25.0, 100.0}) {
    const CriticalParams cp = params_from_q(q);
    CHECK(params_max_violation(cp) < 1e-12);
    CHECK(cp.p == doctest::Approx(std::sqrt(q) / (1 + std::sqrt(q))).epsilon(1e-14));
    CHECK(cp.c == doctest::Approx(2 * std::cosh(cp.lambda / 2)).epsilon(1e-13));
    CHECK(cp.c_b == doctest::Approx(std::exp(cp.lambda / 2)).epsilon(1e-13));
  }
}

TEST_CASE("q <= 4 is rejected") {
  CHECK_THROWS_AS(params_from_q(4), DomainError);
  CHECK_THROWS_AS(params_from_q(2), DomainError);
  CHECK_THROWS_AS(params_from_q(-1), DomainError);
}

TEST_CASE("coupling thresholds at q=25") {
  const CriticalParams cp = params_from_q(25);
  const CouplingThresholds th = CouplingThresholds::from(cp);
  CHECK(th.one_over_c == doctest::Approx(0.377964).epsilon(1e-6));
  CHECK(th.two_over_c == doctest::Approx(0.755929).epsilon(1e-6));
  CHECK(th.one_over_cb == doctest::Approx(0.456850).epsilon(1e-6));
  CHECK(th.clockwise == doctest::Approx(0.958259).epsilon(1e-6));
  CHECK(th.split == doctest::Approx(0.827327).epsilon(1e-6));
  CHECK(cp.clockwise_threshold() == doctest::Approx(th.clockwise));
  CHECK(cp.split_threshold() == doctest::Approx(th.split));
  const double el = std::exp(cp.lambda);
  CHECK(th.p_clockwise() == doctest::Approx(el / (el + 1 / el)).epsilon(1e-13));
  CHECK(th.p11() + th.p00() + th.p01() == doctest::Approx(1).epsilon(1e-14));
}
