#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mareq/scalar_fn.hpp"

using mareq::ScalarFn;

TEST_SUITE("scalar_fn") {

TEST_CASE("default is the zero function") {
  ScalarFn f;
  CHECK(f.is_affine());
  CHECK(f(3.7) == 0.0);
  CHECK(f.integral_between(0, 5) == 0.0);
}

TEST_CASE("affine evaluation and closed-form integral") {
  auto f = ScalarFn::affine(1, 2);
  CHECK(f(0.0) == 1.0);
  CHECK(f(3.0) == 7.0);
  // int_0^3 (1 + 2t) dt = 3 + 9
  CHECK(f.integral_between(0, 3) == doctest::Approx(12.0));
  CHECK(f.integral_between(3, 0) == doctest::Approx(-12.0));
  CHECK(f.integral_between(2, 2) == 0.0);
}

TEST_CASE("affine closed form matches quadrature of the same function") {
  auto f = ScalarFn::affine(1.5, -0.25);
  auto slow = ScalarFn::custom([](double t) { return 1.5 - 0.25 * t; });
  for (double a : {0.0, 0.7, 4.0})
    for (double b : {0.1, 2.3, 9.0})
      CHECK(f.integral_between(a, b) ==
            doctest::Approx(slow.integral_between(a, b)).epsilon(1e-10));
}

TEST_CASE("power form") {
  auto f = ScalarFn::power(1, 2, 3);  // 1 + 2 t^3
  CHECK(f(2.0) == doctest::Approx(17.0));
  // int_0^2 (1 + 2 t^3) dt = 2 + 8
  CHECK(f.integral_between(0, 2) == doctest::Approx(10.0).epsilon(1e-10));
  CHECK_THROWS_AS(ScalarFn::power(1, 1, 0), std::invalid_argument);
}

TEST_CASE("custom form round trips through quadrature") {
  auto f = ScalarFn::custom([](double t) { return std::exp(t); });
  CHECK(f(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(f.integral_between(0, 1) ==
        doctest::Approx(std::exp(1.0) - 1).epsilon(1e-10));
  CHECK_THROWS_AS(ScalarFn::custom(nullptr), std::invalid_argument);
}

TEST_CASE("monotonicity guard checks slopes directly for closed forms") {
  CHECK_NOTHROW(require_monotone(ScalarFn::affine(5, 2), +1, 0, 10, "cost"));
  CHECK_NOTHROW(require_monotone(ScalarFn::affine(5, -2), -1, 0, 10, "dis"));
  CHECK_NOTHROW(require_monotone(ScalarFn::affine(5, 0), +1, 0, 10, "flat"));
  CHECK_THROWS_AS(require_monotone(ScalarFn::affine(5, -2), +1, 0, 10, "cost"),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_monotone(ScalarFn::power(1, -1, 2), +1, 0, 10, "cost"),
                  std::invalid_argument);
}

TEST_CASE("monotonicity guard samples custom forms") {
  auto inc = ScalarFn::custom([](double t) { return t * t * t; });
  CHECK_NOTHROW(require_monotone(inc, +1, 0, 10, "cubic"));
  CHECK_THROWS_AS(require_monotone(inc, -1, 0, 10, "cubic"), std::invalid_argument);
  auto wave = ScalarFn::custom([](double t) { return std::sin(t); });
  CHECK_THROWS_AS(require_monotone(wave, +1, 0, 10, "wave"), std::invalid_argument);
}

}  // TEST_SUITE
