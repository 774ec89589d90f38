#include "ksat/rng.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ksat {

namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline uint64_t mix13(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t Rng::derive(uint64_t key, uint64_t branch) {
  return mix13(mix13(key + kGolden) + branch * kGolden + kGolden);
}

Rng Rng::stream(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t key = mix13(seed + kGolden);
  for (uint64_t b : path) key = derive(key, b);
  return Rng(key);
}

uint64_t Rng::at(uint64_t i) const { return mix13(key_ + i * kGolden); }

double log_factorial(int64_t n) {
  static std::vector<double> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.resize(1 << 16);
    table[0] = 0.0;
    for (size_t i = 1; i < table.size(); i++)
      table[i] = table[i - 1] + std::log(static_cast<double>(i));
  });
  if (n < 0) throw std::invalid_argument("log_factorial: negative n");
  if (n < static_cast<int64_t>(table.size())) return table[n];
  // Stirling series, enough terms for n >= 2^16
  double x = static_cast<double>(n) + 1.0;
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  return (x - 0.5) * std::log(x) - x + 0.9189385332046727 +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

int64_t poisson_inverse(double lambda, double u) {
  if (lambda < 0 || lambda > 60)
    throw std::invalid_argument("poisson_inverse: lambda out of range");
  if (lambda == 0) return 0;
  double p = std::exp(-lambda);
  double cdf = p;
  int64_t x = 0;
  while (u >= cdf) {
    x++;
    p *= lambda / static_cast<double>(x);
    cdf += p;
    if (x > 4096) break;  // u beyond double resolution of the tail
  }
  return x;
}

int64_t Rng::poisson(double lambda) {
  if (lambda < 0) throw std::invalid_argument("poisson: negative lambda");
  if (lambda <= 30.0) return poisson_inverse(lambda, unit());

  // PTRD, W. Hormann (1993), "The transformed rejection method for
  // generating Poisson random variables". The squeeze region accepts
  // without a density evaluation; elsewhere the exact log-density test is
  // used (log k! is table-backed, so there is no reason to approximate).
  const double smu = std::sqrt(lambda);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u;
    double v = unit();
    if (v <= 0.86 * vr) {
      u = v / vr - 0.43;
      double us = 0.5 - std::abs(u);
      return static_cast<int64_t>(
          std::floor((2.0 * a / us + b) * u + lambda + 0.445));
    }
    if (v >= vr) {
      u = unit() - 0.5;
    } else {
      u = v / vr - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = unit() * vr;
    }
    double us = 0.5 - std::abs(u);
    if (us < 0.013 && v > us) continue;
    double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.445);
    if (kf < 0) continue;
    v = v * inv_alpha / (a / (us * us) + b);
    int64_t k = static_cast<int64_t>(kf);
    if (std::log(v) <= kf * std::log(lambda) - lambda - log_factorial(k))
      return k;
  }
}

}  // namespace ksat
