#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ksat/popdyn.hpp"

namespace ksat {

using ColorDist4 = std::array<double, 4>;

struct FreeEnergyEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int64_t samples = 0;
  double alpha = 0.0;
  int k = 0;
  uint64_t clamp_count = 0;
};

// Monte-Carlo estimate of
//   Phi(alpha) = E[ log(Pi+ + Pi- - Pi+ Pi-) - alpha (k-1) log(1 - prod_j eta_j) ]
// with d± ~ Pois(alpha k / 2) and eta resampled from pop. Log arguments are
// clamped below at 2^-53 (clamps counted). alpha_base >= 0 switches the
// degree draws to the coupled base-plus-increment form shared across
// densities.
FreeEnergyEstimate phi_estimate(const Population& pop, double alpha,
                                int64_t samples, uint64_t seed, int workers = 0,
                                double alpha_base = -1.0);

// One sample of the measure-valued recursion: (bη(+), bη(-), bη(f))
// generated from (d, eta) ~ pi_alpha x pop.
std::array<double, 3> sample_beta_measure(const Population& pop, double alpha,
                                          Rng& rng);

// Per-sample color-model Bethe terms (variable, clause, edge).
struct ColTerms {
  double z_dot, z_hat, z_bar;
};
// eta_plus/eta_minus: d± rows of k-1 scalars (the (-)-masses of bη inputs);
// eta_k: k scalars feeding the clause and edge terms.
ColTerms col_terms(const std::vector<std::vector<double>>& eta_plus,
                   const std::vector<std::vector<double>>& eta_minus,
                   const std::vector<double>& eta_k);

// Brute-force enumerations validating the closed forms: the variable term
// sums phi(sigma; d) prod q̂(sigma) over all colorings of the half-edges,
// the clause term sums phî(sigma) prod q̇(sigma) over all 4^k colorings.
// Budget: total degree <= 12.
double col_zdot_oracle(const std::vector<ColorDist4>& qhat_plus,
                       const std::vector<ColorDist4>& qhat_minus);
double col_zhat_oracle(const std::vector<ColorDist4>& qdot);

struct ThresholdConfig {
  int k = 10;
  double alpha_lbd = 0.0;  // 0: default 2^k ln 2 - 2
  double alpha_ubd = 0.0;  // 0: default 2^k ln 2
  double tol = 0.05;
  size_t pop_size = 1000000;
  size_t burn_pop = 100000;    // smaller population for the burn-in sweeps
  int min_iters = 8;
  int max_iters = 60;
  double w1_stop = 3.0;        // stop burn-in when W1 < w1_stop / sqrt(N)
  int final_iters = 1;         // full-size refresh iterations after burn-in
  int64_t samples = 4000000;   // anchor budget for the numerator term
  int64_t diff_samples = 400000;   // paired numerator-difference budget
  int64_t den_draws = 0;       // denominator draws (0: 400 * samples)
  int max_retries = 3;         // budget doublings on an ambiguous sign
  uint64_t seed = 0;
  int workers = 0;

  double lbd() const;
  double ubd() const;
};

struct ThresholdProbe {
  int index = 0;
  double alpha = 0.0;
  double phi_mean = 0.0, phi_stderr = 0.0;
  size_t pop_size = 0;
  uint32_t iters = 0;
  int64_t samples = 0;
  bool decided = false;
};

struct ThresholdResult {
  double alpha_star = 0.0;
  bool bracket_ok = false;
  std::string failure;  // empty on success
  std::vector<ThresholdProbe> probes;
};

// Sign-test bisection on Phi over [alpha_lbd, alpha_ubd]. Every probe runs
// population dynamics to the W1 stopping rule and estimates Phi; sign
// decisions require |mean| > 3 stderr, retrying with a doubled budget.
// Probes share randomness across alphas (common random numbers through the
// monotone coupling of the degree draws).
ThresholdResult find_threshold(const ThresholdConfig& cfg);

// CSV audit trail: "probe,alpha,phi_mean,phi_stderr,pop_size,iters,seed".
std::string threshold_audit_csv(const ThresholdResult& res,
                                const ThresholdConfig& cfg);

// ---------------------------------------------------------------------------
// Interpolation upper bound.

// Weights of the positive-temperature clause term. u_plus/u_minus partition
// u_total by the value of the last coordinate:
//   u_x = sum_{x_k = x} exp(-beta theta(x_vec)) prod_{j<=k} r(x_j | rho_j),
// and u_total = u_plus + u_minus = 1 - (1 - e^-beta) prod_j r(-L_j | rho_j).
struct InterpU {
  double u_plus, u_minus, u_total;
};
InterpU interp_u(const std::vector<int8_t>& theta_signs,
                 const std::vector<double>& rho, double beta);

// The (k-1)-factor clause weight of the interpolation functional:
//   u_a(x) = 1 - (1 - e^-beta) 1{x = -L_k} prod_{j<k} r(-L_j | rho_j).
double interp_u_given(const std::vector<int8_t>& theta_signs,
                      const std::vector<double>& rho_k_minus_1, double beta,
                      int8_t x);

struct InterpConfig {
  double beta = 1.0;
  double m = 0.5;  // in (0,1)
  int64_t outer = 1000;
  int64_t inner = 1000;
  int k = 4;
  double alpha = 1.0;
  uint64_t seed = 0;
  int workers = 0;
};

struct InterpEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int64_t outer = 0;
};

// Nested Monte Carlo for Phi_1(zeta, m) with the survey-propagation choice
// of zeta: rho supported on {beta, -beta, 0} with weights bη ~ bμ built
// from pop. Outer draws (d, theta, bη); inner draws rho | bη.
InterpEstimate interp_bound(const InterpConfig& cfg, const Population& pop);

}  // namespace ksat
