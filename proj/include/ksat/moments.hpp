#pragma once

#include <string>
#include <vector>

#include "ksat/rational.hpp"

namespace ksat {

// First/second-moment exponent curves for random k-SAT and NAE-SAT.
// Natural logarithms throughout; H(0) = H(1) = 0 by continuity.

double entropy_h(double z);

// n^-1 log E[Z]   = log 2 + alpha log(1 - 1/2^k)
double phi1(int k, double alpha);
// n^-1 log E[Z_nae] = log 2 + alpha log(1 - 2/2^k)
double psi1(int k, double alpha);

// Pair-overlap exponents at overlap z in [0,1]:
//   phi(z) = log 2 + H(z) + alpha log(1 - 2/2^k + z^k/2^k)
//   psi(z) = log 2 + H(z) + alpha log(1 - 4/2^k + (z^k + (1-z)^k) 2/2^k)
double phi_z(int k, double alpha, double z);
double psi_z(int k, double alpha, double z);

// Root of phi1(alpha) = 0: alpha1 = -log 2 / log(1 - 2^-k).
double alpha1_root(int k);

// E[Z^2[z]] under m fixed clauses: 2^n binom(n,nz) (1 - 2/2^k + (z/2)^k)^m.
// Requires nz integral. Exact in rational arithmetic for n <= 30.
double exact_pair_moment(int n, int m, int k, double z);
Rational exact_pair_moment_rational(int n, int m, int k, int nz);

// Independent oracle: enumerates every possible clause (all of [n]^k signed
// patterns) with equal weight and sums, over all assignment pairs at overlap
// nz, the probability that m i.i.d. clauses are satisfied by both. Exact
// rational arithmetic. Budget: n <= 6, m <= 4, k <= 4.
double brute_force_pair_moment(int n, int m, int k, double z);
Rational brute_force_pair_moment_rational(int n, int m, int k, int nz);

struct MomentCurve {
  std::vector<double> grid;    // z values (or alpha, per function id)
  std::vector<double> values;
  int k = 0;
  double alpha = 0.0;
  std::string function;  // "phi", "psi", "phi_minus_2phi1", ...
};

MomentCurve sample_curve(const std::string& function, int k, double alpha,
                         int grid_points);
// CSV with header "z,value,k,alpha,function"; prepends "# " comment lines.
std::string curve_csv(const MomentCurve& curve,
                      const std::string& config_header);

}  // namespace ksat
