#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "invasion/matrix.hpp"

using namespace invasion;

TEST_CASE("identity and element access") {
  const Matrix id = Matrix::identity(3);
  CHECK(id.rows() == 3);
  CHECK(id.cols() == 3);
  CHECK(id(1, 1) == 1.0);
  CHECK(id(1, 2) == 0.0);

  Matrix a(2, 3);
  a(1, 2) = 5.0;
  CHECK(a.data()[1 * 3 + 2] == 5.0);
}

TEST_CASE("lu_solve recovers a hand-solved system") {
  // 2x + y - z = 8; -3x - y + 2z = -11; -2x + y + 2z = -3  =>  (2, 3, -1)
  Matrix a(3, 3);
  a(0, 0) = 2;  a(0, 1) = 1;  a(0, 2) = -1;
  a(1, 0) = -3; a(1, 1) = -1; a(1, 2) = 2;
  a(2, 0) = -2; a(2, 1) = 1;  a(2, 2) = 2;
  const std::vector<double> x = lu_solve(a, {8, -11, -3});
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("lu_solve needs pivoting on a zero leading entry") {
  Matrix a(2, 2);
  a(0, 0) = 0; a(0, 1) = 1;
  a(1, 0) = 1; a(1, 1) = 0;
  const std::vector<double> x = lu_solve(a, {3, 4});
  CHECK(x[0] == doctest::Approx(4.0));
  CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("lu_solve rejects bad shapes and singular systems") {
  Matrix rect(2, 3);
  CHECK_THROWS_AS(lu_solve(rect, {1, 2}), std::invalid_argument);
  Matrix sq(2, 2);
  CHECK_THROWS_AS(lu_solve(sq, {1, 2, 3}), std::invalid_argument);

  Matrix singular(2, 2);
  singular(0, 0) = 1; singular(0, 1) = 2;
  singular(1, 0) = 2; singular(1, 1) = 4;
  CHECK_THROWS_AS(lu_solve(singular, {1, 1}), std::domain_error);
}
