#include "ksat/moments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ksat/errors.hpp"
#include "ksat/rng.hpp"

namespace ksat {

double entropy_h(double z) {
  if (z < 0 || z > 1) throw std::invalid_argument("entropy_h: z outside [0,1]");
  if (z == 0 || z == 1) return 0.0;
  return -z * std::log(z) - (1 - z) * std::log(1 - z);
}

double phi1(int k, double alpha) {
  if (k < 2) throw std::invalid_argument("phi1: k >= 2 required");
  return std::log(2.0) + alpha * std::log1p(-std::pow(2.0, -k));
}

double psi1(int k, double alpha) {
  if (k < 2) throw std::invalid_argument("psi1: k >= 2 required");
  return std::log(2.0) + alpha * std::log1p(-2.0 * std::pow(2.0, -k));
}

double phi_z(int k, double alpha, double z) {
  double p = std::pow(2.0, -k);
  return std::log(2.0) + entropy_h(z) +
         alpha * std::log(1.0 - 2.0 * p + std::pow(z, k) * p);
}

double psi_z(int k, double alpha, double z) {
  double p = std::pow(2.0, -k);
  return std::log(2.0) + entropy_h(z) +
         alpha * std::log(1.0 - 4.0 * p +
                          (std::pow(z, k) + std::pow(1.0 - z, k)) * 2.0 * p);
}

double alpha1_root(int k) {
  if (k < 2) throw std::invalid_argument("alpha1_root: k >= 2 required");
  return -std::log(2.0) / std::log1p(-std::pow(2.0, -k));
}

namespace {

int integral_overlap(int n, double z) {
  double nz = n * z;
  double r = std::round(nz);
  if (std::abs(nz - r) > 1e-9)
    throw std::invalid_argument("pair moment: nz must be integral");
  return static_cast<int>(r);
}

}  // namespace

Rational exact_pair_moment_rational(int n, int m, int k, int nz) {
  if (nz < 0 || nz > n) throw std::invalid_argument("pair moment: nz outside [0,n]");
  // q = (2^k n^k - 2 n^k + nz^k) / (2^k n^k)
  Rational nk = Rational::from_uint_pow(static_cast<uint64_t>(n), k);
  Rational num = Rational::from_uint_pow(2, k) * nk - Rational(2) * nk +
                 Rational::from_uint_pow(static_cast<uint64_t>(nz), k);
  Rational q = num / (Rational::from_uint_pow(2, k) * nk);
  Rational count(1, BigUint::from_pow(2, n) * binomial_exact(n, nz), BigUint(1));
  return count * q.pow(m);
}

double exact_pair_moment(int n, int m, int k, double z) {
  int nz = integral_overlap(n, z);
  if (n <= 30) return exact_pair_moment_rational(n, m, k, nz).to_double();
  // log-space for large n
  double logc = n * std::log(2.0) + log_factorial(n) - log_factorial(nz) -
                log_factorial(n - nz);
  double p = std::pow(2.0, -k);
  double logq = std::log(1.0 - 2.0 * p + std::pow(z / 2.0, k));
  return std::exp(logc + m * logq);
}

Rational brute_force_pair_moment_rational(int n, int m, int k, int nz) {
  if (n > 6 || m > 4 || k > 4)
    throw BudgetExceeded("budget: brute_force_pair_moment n <= 6, m <= 4, k <= 4");
  if (nz < 0 || nz > n) throw std::invalid_argument("pair moment: nz outside [0,n]");
  // All (2n)^k equally likely clauses: a clause is (v_1..v_k, s_1..s_k).
  // For each assignment pair (x,y) at overlap nz, count the clauses
  // satisfied by both; clauses are i.i.d., so the pair contributes
  // (count/(2n)^k)^m.
  const int64_t total_assign = int64_t(1) << n;
  int64_t clause_space = 1;
  for (int j = 0; j < k; j++) clause_space *= 2 * n;

  Rational sum(0);
  std::vector<int> vars(k), signs(k);
  for (int64_t x = 0; x < total_assign; x++) {
    for (int64_t y = 0; y < total_assign; y++) {
      int agree = 0;
      for (int v = 0; v < n; v++)
        if (((x >> v) & 1) == ((y >> v) & 1)) agree++;
      if (agree != nz) continue;
      // count clauses satisfied by both x and y
      int64_t good = 0;
      std::vector<int> idx(k, 0);
      for (int64_t code = 0; code < clause_space; code++) {
        int64_t c = code;
        bool sat_x = false, sat_y = false;
        for (int j = 0; j < k; j++) {
          int lit = static_cast<int>(c % (2 * n));
          c /= 2 * n;
          int v = lit >> 1;
          int s = lit & 1;  // 1 = negated
          bool xv = ((x >> v) & 1) != 0;
          bool yv = ((y >> v) & 1) != 0;
          if ((s ? !xv : xv)) sat_x = true;
          if ((s ? !yv : yv)) sat_y = true;
        }
        if (sat_x && sat_y) good++;
      }
      sum += Rational(good, clause_space).pow(m);
    }
  }
  return sum;
}

double brute_force_pair_moment(int n, int m, int k, double z) {
  return brute_force_pair_moment_rational(n, m, k, integral_overlap(n, z))
      .to_double();
}

MomentCurve sample_curve(const std::string& function, int k, double alpha,
                         int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("sample_curve: grid too small");
  MomentCurve c;
  c.k = k;
  c.alpha = alpha;
  c.function = function;
  c.grid.reserve(grid_points);
  c.values.reserve(grid_points);
  for (int i = 0; i < grid_points; i++) {
    double z = static_cast<double>(i) / (grid_points - 1);
    double v;
    if (function == "phi")
      v = phi_z(k, alpha, z);
    else if (function == "psi")
      v = psi_z(k, alpha, z);
    else if (function == "phi_minus_2phi1")
      v = phi_z(k, alpha, z) - 2 * phi1(k, alpha);
    else if (function == "psi_minus_2psi1")
      v = psi_z(k, alpha, z) - 2 * psi1(k, alpha);
    else
      throw std::invalid_argument("sample_curve: unknown function " + function);
    c.grid.push_back(z);
    c.values.push_back(v);
  }
  return c;
}

std::string curve_csv(const MomentCurve& c, const std::string& config_header) {
  std::ostringstream out;
  if (!config_header.empty()) out << "# " << config_header << "\n";
  out << "z,value,k,alpha,function\n";
  out.precision(17);
  for (size_t i = 0; i < c.grid.size(); i++) {
    out << c.grid[i] << "," << c.values[i] << "," << c.k << "," << c.alpha
        << "," << c.function << "\n";
  }
  return out.str();
}

}  // namespace ksat
