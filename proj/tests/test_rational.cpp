#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ksat/rational.hpp"

using namespace ksat;

TEST_CASE("big integer arithmetic") {
  BigUint a(123456789012345ULL);
  BigUint b(987654321ULL);
  CHECK((a * b).to_string() == "121932631124827861592745");
  CHECK((a + b).to_string() == "123457776666666");
  CHECK((a - b).to_string() == "123455801358024");
  BigUint q, r;
  BigUint::divmod(a, b, q, r);
  CHECK(q.to_string() == "124999");
  CHECK((q * b + r) == a);
  CHECK(BigUint::from_pow(2, 100).to_string() ==
        "1267650600228229401496703205376");
  CHECK(BigUint::gcd(BigUint(48), BigUint(36)) == BigUint(12));
}

TEST_CASE("rational arithmetic stays reduced") {
  Rational a(1, 2), b(1, 3);
  CHECK((a + b) == Rational(5, 6));
  CHECK((a - b) == Rational(1, 6));
  CHECK((a * b) == Rational(1, 6));
  CHECK((a / b) == Rational(3, 2));
  CHECK((b - a) == Rational(-1, 6));
  CHECK((Rational(2, 4)) == Rational(1, 2));
  CHECK(Rational(-6, -8) == Rational(3, 4));
  CHECK(Rational(6, -8) == Rational(-3, 4));
  CHECK(Rational(0, 5) == Rational(0));
  CHECK(Rational(1, 3).pow(4) == Rational(1, 81));
  CHECK(Rational(1, 2).to_double() == 0.5);
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK((Rational(1, 7) + Rational(6, 7)) == Rational(1));
}

TEST_CASE("deep products neither overflow nor lose exactness") {
  Rational p(1);
  for (int i = 0; i < 200; i++) p *= Rational(3, 7);
  Rational expect(1, BigUint::from_pow(3, 200), BigUint::from_pow(7, 200));
  CHECK(p == expect);
  Rational back = p / expect;
  CHECK(back == Rational(1));
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial_exact(4, 2) == BigUint(6));
  CHECK(binomial_exact(10, 0) == BigUint(1));
  CHECK(binomial_exact(10, 10) == BigUint(1));
  CHECK(binomial_exact(5, 7).is_zero());
  CHECK(binomial_exact(60, 30).to_string() == "118264581564861424");
}
