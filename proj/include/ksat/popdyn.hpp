#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ksat/rng.hpp"

namespace ksat {

// Empirical approximation of the distributional recursion's iterate.
// Samples live in [0, 1); values are clamped at 1 - 2^-53 and the clamp
// count of the last evolution step is recorded.
struct Population {
  std::vector<double> samples;
  int k = 0;
  double alpha = 0.0;
  uint32_t iter = 0;
  uint64_t seed = 0;
  uint64_t clamp_count = 0;

  size_t size() const { return samples.size(); }
};

Population population_constant(int k, double alpha, size_t n, double value);
// mu_0 = point mass at 1/2
Population population_delta_half(int k, double alpha, size_t n);

// One explicit draw of the recursion's randomness, for direct evaluation.
struct RecursionDraw {
  int64_t d_plus = 0, d_minus = 0;
  std::vector<std::vector<double>> eta_plus;   // d_plus rows of k-1 entries
  std::vector<std::vector<double>> eta_minus;  // d_minus rows
};

// R(d, eta) = (1 - Pi-) Pi+ / (Pi+ + Pi- - Pi+ Pi-), with
// Pi± = prod_i (1 - prod_j eta±_ij). Output in [0, 1) for inputs in [0, 1).
double recursion_sample(const RecursionDraw& draw);

struct EvolveOptions {
  int workers = 0;          // 0 = hardware concurrency
  double alpha_base = -1.0; // < 0: plain evolution at pop.alpha; otherwise
                            // clause counts are drawn at alpha_base and
                            // topped up by a quantile-coupled Pois increment
                            // (common random numbers across nearby alphas)
  size_t resize = 0;        // 0 = keep size
};

// iters steps of the sampled recursion. Each output sample i of iteration l
// uses substreams keyed by (seed, l, i): fresh d± ~ Pois(alpha k/2) and eta
// entries resampled with replacement from the previous population. The
// result is independent of the worker count.
Population evolve(const Population& pop, int iters, uint64_t seed,
                  const EvolveOptions& opt = {});

// Joint evolution under the monotone coupling: the high-density copy uses
// d̈± = ḋ± + δ± with δ± ~ Pois((alpha_high - alpha_low) k / 2) and shares
// the eta index draws on the common prefix.
std::pair<Population, Population> coupled_evolve(const Population& pop_low,
                                                 const Population& pop_high,
                                                 double alpha_low,
                                                 double alpha_high, int iters,
                                                 uint64_t seed, int workers = 0);

// Exact W1 distance between empirical measures (mean absolute difference of
// sorted samples when sizes agree; quantile-coupling integral otherwise).
double wasserstein1(std::vector<double> a, std::vector<double> b);
double wasserstein1(const Population& a, const Population& b);

// Empirical tail exceedances against the envelopes
//   P(eta <= 1/2 - s)          <= exp(-s 2^{k/4})
//   P(log[eta/(1-eta)] >= s)   <= exp(-s 2^{k/4})
// for s >= 2^{-k/4}. Soft diagnostics; `slack` is the allowance in units of
// 1/sqrt(N) before a flag is raised.
struct TailReport {
  struct Entry {
    double s;
    double frac_low, frac_logit;
    double envelope;
    bool low_flag, logit_flag;
  };
  std::vector<Entry> entries;
  int flags = 0;
};
TailReport tail_diagnostics(const Population& pop, int k,
                            std::vector<double> grid = {}, double slack = 5.0);

// Snapshot format: header line
//   POPDYN v1 k=<u32> alpha=<decimal17> iter=<u32> seed=<u64> N=<u64>
// then N sample lines with 17 significant digits, LF endings.
std::string snapshot_string(const Population& pop);
void snapshot_save(const Population& pop, const std::string& path);
Population snapshot_parse(const std::string& text);
Population snapshot_load(const std::string& path);

}  // namespace ksat
