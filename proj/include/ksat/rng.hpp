#pragma once

#include <cstdint>
#include <initializer_list>

namespace ksat {

// Counter-based pseudorandom generator.
//
// Output n of a stream with key s is mix(s + n * GOLDEN), where mix is the
// Stafford "variant 13" finalizer of SplitMix64. Every draw is a pure
// function of (key, counter), so draws can be indexed out of order and the
// same (seed, stream path) pair reproduces bit-identically on any platform.
class Rng {
 public:
  explicit Rng(uint64_t key) : key_(key) {}

  // Derives an independent stream key from (parent key, branch id).
  static uint64_t derive(uint64_t key, uint64_t branch);

  // Convenience: chain of derivations starting from a user seed.
  static Rng stream(uint64_t seed, std::initializer_list<uint64_t> path);

  uint64_t next() { return at(ctr_++); }

  // Random access into the stream; does not advance the counter.
  uint64_t at(uint64_t i) const;

  // Uniform in [0,1) with 53 random bits.
  double unit() { return to_unit(next()); }
  double unit_at(uint64_t i) const { return to_unit(at(i)); }

  // Uniform integer in [0,n). Multiply-shift; bias is below n/2^64.
  uint64_t below(uint64_t n) { return map_below(next(), n); }
  uint64_t below_at(uint64_t i, uint64_t n) const { return map_below(at(i), n); }

  // Pois(lambda) by sequential inversion for lambda <= 30, otherwise by
  // Hormann's PTRD transformed-rejection method. Consumes a variable number
  // of stream outputs.
  int64_t poisson(double lambda);

  int8_t sign() { return (next() >> 63) ? int8_t(-1) : int8_t(1); }

  static double to_unit(uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1.0p-53;
  }
  static uint64_t map_below(uint64_t r, uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(r) * n) >> 64);
  }

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
  uint64_t ctr_ = 0;
};

// Quantile function of Pois(lambda) evaluated at u in [0,1), by sequential
// inversion. Requires lambda <= 60 (p0 stays in normal double range).
// Monotone in lambda for fixed u, which is what couples clause counts
// across nearby densities.
int64_t poisson_inverse(double lambda, double u);

// log(n!) with a fixed summation order; table-backed and deterministic.
double log_factorial(int64_t n);

}  // namespace ksat
