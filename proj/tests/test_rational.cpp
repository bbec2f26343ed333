#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specmorph/rational.hpp"

using namespace specmorph;

TEST_CASE("normalization and arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
  CHECK(Rational(7, 8) - Rational(7, 8) == Rational(0));
  CHECK(Rational(5, 3) / Rational(5, 3) == Rational(1));
  CHECK(Rational(-2).pow(3) == Rational(-8));
  CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
}

TEST_CASE("ordering") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(2, 6) == Rational(1, 3));
}

TEST_CASE("exact roots") {
  CHECK(Rational(4).exact_root(2) == Rational(2));
  CHECK(Rational(8, 27).exact_root(3) == Rational(2, 3));
  CHECK(Rational(-8).exact_root(3) == Rational(-2));
  CHECK(!Rational(2).exact_root(2).has_value());
  CHECK(!Rational(-4).exact_root(2).has_value());
  CHECK(Rational(9, 16).exact_root(2) == Rational(3, 4));
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
  CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("overflow is detected, not wrapped") {
  Rational big(INT64_MAX / 2, 1);
  CHECK_THROWS_AS(big * big, Error);
  // Products that renormalize stay fine.
  Rational a(INT64_MAX / 2, 3), b(3, INT64_MAX / 2);
  CHECK(a * b == Rational(1));
}

TEST_CASE("gaussian rationals") {
  CRational i = CRational::i();
  CHECK(i * i == CRational(-1));
  CHECK((i * i * i * i).is_one());
  CRational z(Rational(1, 2), Rational(-3, 4));
  CHECK(z * z.conj() == CRational(Rational(1, 4) + Rational(9, 16)));
  CHECK(z / z == CRational(1));
  CHECK(i.pow(-1) == -i);
}
