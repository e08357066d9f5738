#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include "invasion/rational.hpp"

using namespace invasion;

TEST_CASE("rationals reduce and normalize signs") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0, 3));
  CHECK(Rational(5) == Rational(5, 1));
}

TEST_CASE("arithmetic matches hand values") {
  const Rational a(1, 6), b(1, 10);
  CHECK(a + b == Rational(4, 15));
  CHECK(a - b == Rational(1, 15));
  CHECK(a * b == Rational(1, 60));
  CHECK(a / b == Rational(5, 3));
  CHECK(a + 1 == Rational(7, 6));
  CHECK(a * 0 == Rational(0));
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("a five-term row sums to exactly one") {
  // the aggregated-kernel row shape: five nonnegative terms over a common
  // denominator must collapse to 1 with no rounding at all
  const Rational sum = Rational(1, 10) + Rational(1, 5) + Rational(2, 15) +
                       Rational(1, 15) + Rational(1, 2);
  CHECK(sum == Rational(1));
}

TEST_CASE("invalid denominators and overflow are loud") {
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1, 2) / Rational(0, 5), std::domain_error);
  const Rational huge(INT64_MAX, 1);
  CHECK_THROWS_AS(huge + huge, std::overflow_error);
  CHECK_THROWS_AS(huge * huge, std::overflow_error);
}
