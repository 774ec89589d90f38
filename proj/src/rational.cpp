#include "ksat/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace ksat {

BigUint::BigUint(uint64_t v) {
  if (v) limbs_.push_back(static_cast<uint32_t>(v & 0xffffffffu));
  if (v >> 32) limbs_.push_back(static_cast<uint32_t>(v >> 32));
}

BigUint BigUint::from_pow(uint64_t base, unsigned exp) {
  BigUint r(1);
  BigUint b(base);
  while (exp) {
    if (exp & 1) r = r * b;
    b = b * b;
    exp >>= 1;
  }
  return r;
}

void BigUint::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

int BigUint::cmp(const BigUint& o) const {
  if (limbs_.size() != o.limbs_.size())
    return limbs_.size() < o.limbs_.size() ? -1 : 1;
  for (size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
  }
  return 0;
}

BigUint BigUint::operator+(const BigUint& o) const {
  BigUint r;
  const size_t n = std::max(limbs_.size(), o.limbs_.size());
  r.limbs_.resize(n, 0);
  uint64_t carry = 0;
  for (size_t i = 0; i < n; i++) {
    uint64_t s = carry;
    if (i < limbs_.size()) s += limbs_[i];
    if (i < o.limbs_.size()) s += o.limbs_[i];
    r.limbs_[i] = static_cast<uint32_t>(s);
    carry = s >> 32;
  }
  if (carry) r.limbs_.push_back(static_cast<uint32_t>(carry));
  return r;
}

BigUint BigUint::operator-(const BigUint& o) const {
  if (cmp(o) < 0) throw std::underflow_error("BigUint subtraction underflow");
  BigUint r;
  r.limbs_.resize(limbs_.size(), 0);
  int64_t borrow = 0;
  for (size_t i = 0; i < limbs_.size(); i++) {
    int64_t s = static_cast<int64_t>(limbs_[i]) - borrow -
                (i < o.limbs_.size() ? o.limbs_[i] : 0);
    borrow = 0;
    if (s < 0) {
      s += (int64_t(1) << 32);
      borrow = 1;
    }
    r.limbs_[i] = static_cast<uint32_t>(s);
  }
  r.trim();
  return r;
}

BigUint BigUint::operator*(const BigUint& o) const {
  if (is_zero() || o.is_zero()) return BigUint();
  BigUint r;
  r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
  for (size_t i = 0; i < limbs_.size(); i++) {
    uint64_t carry = 0;
    for (size_t j = 0; j < o.limbs_.size(); j++) {
      uint64_t cur = r.limbs_[i + j] +
                     static_cast<uint64_t>(limbs_[i]) * o.limbs_[j] + carry;
      r.limbs_[i + j] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    size_t pos = i + o.limbs_.size();
    while (carry) {
      uint64_t cur = r.limbs_[pos] + carry;
      r.limbs_[pos] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
      pos++;
    }
  }
  r.trim();
  return r;
}

void BigUint::divmod(const BigUint& num, const BigUint& den, BigUint& q,
                     BigUint& r) {
  if (den.is_zero()) throw std::domain_error("BigUint division by zero");
  q = BigUint();
  r = BigUint();
  if (num.is_zero()) return;
  q.limbs_.assign(num.limbs_.size(), 0);
  // bitwise long division, msb to lsb
  for (size_t i = num.limbs_.size(); i-- > 0;) {
    for (int bit = 31; bit >= 0; bit--) {
      // r = (r << 1) | bit_of(num)
      uint32_t carry = (num.limbs_[i] >> bit) & 1u;
      for (size_t j = 0; j < r.limbs_.size(); j++) {
        uint32_t next = r.limbs_[j] >> 31;
        r.limbs_[j] = (r.limbs_[j] << 1) | carry;
        carry = next;
      }
      if (carry) r.limbs_.push_back(carry);
      if (r.cmp(den) >= 0) {
        r = r - den;
        q.limbs_[i] |= (1u << bit);
      }
    }
  }
  q.trim();
  r.trim();
}

BigUint BigUint::gcd(BigUint a, BigUint b) {
  while (!b.is_zero()) {
    BigUint q, r;
    divmod(a, b, q, r);
    a = b;
    b = r;
  }
  return a;
}

double BigUint::to_double() const {
  double r = 0.0;
  for (size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + limbs_[i];
  return r;
}

std::string BigUint::to_string() const {
  if (is_zero()) return "0";
  BigUint n = *this;
  BigUint ten(10);
  std::string s;
  while (!n.is_zero()) {
    BigUint q, r;
    divmod(n, ten, q, r);
    uint32_t digit = r.is_zero() ? 0 : r.limbs_[0];
    s.push_back(static_cast<char>('0' + digit));
    n = q;
  }
  return std::string(s.rbegin(), s.rend());
}

Rational::Rational(int64_t v)
    : sign_(v == 0 ? 0 : (v < 0 ? -1 : 1)),
      num_(static_cast<uint64_t>(v < 0 ? -v : v)),
      den_(1) {}

Rational::Rational(int64_t num, int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  int s = 1;
  if (num < 0) {
    s = -s;
    num = -num;
  }
  if (den < 0) {
    s = -s;
    den = -den;
  }
  sign_ = (num == 0) ? 0 : s;
  num_ = BigUint(static_cast<uint64_t>(num));
  den_ = BigUint(static_cast<uint64_t>(den));
  normalize();
}

Rational::Rational(int sign, BigUint num, BigUint den)
    : sign_(sign), num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  if (num_.is_zero()) sign_ = 0;
  normalize();
}

Rational Rational::from_uint_pow(uint64_t base, unsigned exp) {
  return Rational(base == 0 && exp > 0 ? 0 : 1, BigUint::from_pow(base, exp),
                  BigUint(1));
}

void Rational::normalize() {
  if (sign_ == 0) {
    num_ = BigUint();
    den_ = BigUint(1);
    return;
  }
  BigUint g = BigUint::gcd(num_, den_);
  BigUint q, r;
  BigUint::divmod(num_, g, q, r);
  num_ = q;
  BigUint::divmod(den_, g, q, r);
  den_ = q;
}

Rational Rational::operator+(const Rational& o) const {
  if (sign_ == 0) return o;
  if (o.sign_ == 0) return *this;
  BigUint a = num_ * o.den_;
  BigUint b = o.num_ * den_;
  BigUint den = den_ * o.den_;
  if (sign_ == o.sign_) return Rational(sign_, a + b, den);
  int c = a.cmp(b);
  if (c == 0) return Rational();
  if (c > 0) return Rational(sign_, a - b, den);
  return Rational(o.sign_, b - a, den);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.sign_ = -r.sign_;
  return r;
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  if (sign_ == 0 || o.sign_ == 0) return Rational();
  return Rational(sign_ * o.sign_, num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.sign_ == 0) throw std::domain_error("Rational: division by zero");
  if (sign_ == 0) return Rational();
  return Rational(sign_ * o.sign_, num_ * o.den_, den_ * o.num_);
}

bool Rational::operator==(const Rational& o) const {
  return sign_ == o.sign_ && num_ == o.num_ && den_ == o.den_;
}

bool Rational::operator<(const Rational& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_;
  if (sign_ == 0) return false;
  int c = (num_ * o.den_).cmp(o.num_ * den_);
  return sign_ > 0 ? c < 0 : c > 0;
}

double Rational::to_double() const {
  if (sign_ == 0) return 0.0;
  // scale so both parts stay in double range
  double n = num_.to_double();
  double d = den_.to_double();
  if (std::isfinite(n) && std::isfinite(d)) return sign_ * n / d;
  throw std::overflow_error("Rational::to_double: out of double range");
}

std::string Rational::to_string() const {
  if (sign_ == 0) return "0";
  std::string s = (sign_ < 0 ? "-" : "");
  return s + num_.to_string() + "/" + den_.to_string();
}

Rational Rational::pow(unsigned e) const {
  Rational r(1);
  Rational b = *this;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

BigUint binomial_exact(unsigned n, unsigned k) {
  if (k > n) return BigUint();
  if (k > n - k) k = n - k;
  BigUint num(1), den(1);
  for (unsigned i = 0; i < k; i++) {
    num = num * BigUint(n - i);
    den = den * BigUint(i + 1);
  }
  BigUint q, r;
  BigUint::divmod(num, den, q, r);
  return q;  // exact, remainder always zero
}

}  // namespace ksat
