#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ksat {

// Arbitrary-precision unsigned integer, base 2^32 limbs, little-endian.
// Schoolbook arithmetic; operand sizes in this project stay small.
class BigUint {
 public:
  BigUint() = default;
  BigUint(uint64_t v);

  static BigUint from_pow(uint64_t base, unsigned exp);

  bool is_zero() const { return limbs_.empty(); }
  bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
  // three-way: -1, 0, +1
  int cmp(const BigUint& o) const;

  BigUint operator+(const BigUint& o) const;
  BigUint operator-(const BigUint& o) const;  // requires *this >= o
  BigUint operator*(const BigUint& o) const;

  static BigUint gcd(BigUint a, BigUint b);
  // divide by a (nonzero) BigUint that is known to divide *this exactly is
  // not needed; general divmod:
  static void divmod(const BigUint& num, const BigUint& den, BigUint& q,
                     BigUint& r);

  double to_double() const;
  std::string to_string() const;  // decimal

 private:
  void trim();
  std::vector<uint32_t> limbs_;
};

// Exact rational with BigUint magnitude and explicit sign, always reduced.
class Rational {
 public:
  Rational() : sign_(0), num_(0), den_(1) {}
  Rational(int64_t v);
  Rational(int64_t num, int64_t den);
  Rational(int sign, BigUint num, BigUint den);

  static Rational from_uint_pow(uint64_t base, unsigned exp);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const;
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }
  double to_double() const;
  std::string to_string() const;  // "num/den"

  // Rational x with 0 <= x: integer power
  Rational pow(unsigned e) const;

 private:
  void normalize();
  int sign_;  // -1, 0, +1
  BigUint num_, den_;
};

// binomial(n, k) exactly
BigUint binomial_exact(unsigned n, unsigned k);

}  // namespace ksat
