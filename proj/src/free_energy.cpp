#include "ksat/free_energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "ksat/cluster_models.hpp"
#include "ksat/errors.hpp"
#include "ksat/parallel.hpp"

namespace ksat {

namespace {

constexpr double kLogFloor = 0x1.0p-53;
constexpr uint64_t kTagPhi = 0xF1;
constexpr uint64_t kTagInterp = 0x17;

constexpr uint64_t kBranchDegrees = 1;
constexpr uint64_t kBranchEtaPlus = 2;
constexpr uint64_t kBranchEtaMinus = 3;
constexpr uint64_t kBranchIncrement = 4;
constexpr uint64_t kBranchDenominator = 5;

inline double side_product_indexed(const double* prev, size_t n,
                                   const Rng& stream, int64_t d, int k) {
  double prod = 1.0;
  uint64_t ctr = 0;
  const int km1 = k - 1;
  for (int64_t c = 0; c < d; c++) {
    double u0 = 1.0, u1 = 1.0;
    int j = 0;
    for (; j + 1 < km1; j += 2) {
      u0 *= prev[Rng::map_below(stream.at(ctr + j), n)];
      u1 *= prev[Rng::map_below(stream.at(ctr + j + 1), n)];
    }
    if (j < km1) u0 *= prev[Rng::map_below(stream.at(ctr + j), n)];
    ctr += km1;
    prod *= 1.0 - u0 * u1;
    if (prod < 1e-290) prod = 1e-290;
  }
  return prod;
}

}  // namespace

FreeEnergyEstimate phi_estimate(const Population& pop, double alpha,
                                int64_t samples, uint64_t seed, int workers,
                                double alpha_base) {
  if (pop.samples.empty()) throw std::invalid_argument("phi_estimate: empty population");
  const int k = pop.k;
  if (!(alpha >= 0.0) || alpha > std::pow(2.0, k + 2))
    throw std::invalid_argument("phi_estimate: alpha outside [0, 2^(k+2)]");
  if (samples < 1) throw std::invalid_argument("phi_estimate: samples >= 1");
  double base = alpha_base < 0 ? alpha : alpha_base;
  if (base > alpha)
    throw std::invalid_argument("phi_estimate: alpha_base must not exceed alpha");
  const double lam_base = base * k / 2.0;
  const double lam_inc = (alpha - base) * k / 2.0;
  const double* prev = pop.samples.data();
  const size_t n = pop.samples.size();
  const uint64_t root_key = Rng::stream(seed, {kTagPhi}).key();

  std::vector<double> values(static_cast<size_t>(samples));
  std::atomic<uint64_t> clamps{0};
  parallel_for(static_cast<size_t>(samples), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++) {
      uint64_t key_i = Rng::derive(root_key, i);
      Rng rng_d(Rng::derive(key_i, kBranchDegrees));
      int64_t dp = rng_d.poisson(lam_base);
      int64_t dm = rng_d.poisson(lam_base);
      if (lam_inc > 0) {
        Rng rng_inc(Rng::derive(key_i, kBranchIncrement));
        dp += poisson_inverse(lam_inc, rng_inc.unit_at(0));
        dm += poisson_inverse(lam_inc, rng_inc.unit_at(1));
      }
      Rng ep(Rng::derive(key_i, kBranchEtaPlus));
      Rng em(Rng::derive(key_i, kBranchEtaMinus));
      double pp = side_product_indexed(prev, n, ep, dp, k);
      double pm = side_product_indexed(prev, n, em, dm, k);
      double arg1 = pp + pm - pp * pm;
      if (arg1 < kLogFloor) {
        arg1 = kLogFloor;
        clamps.fetch_add(1, std::memory_order_relaxed);
      }
      Rng den(Rng::derive(key_i, kBranchDenominator));
      double u = 1.0;
      for (int j = 0; j < k; j++) u *= prev[Rng::map_below(den.at(j), n)];
      double arg2 = 1.0 - u;
      if (arg2 < kLogFloor) {
        arg2 = kLogFloor;
        clamps.fetch_add(1, std::memory_order_relaxed);
      }
      values[i] = std::log(arg1) - alpha * (k - 1) * std::log(arg2);
    }
  });
  FreeEnergyEstimate est;
  est.k = k;
  est.alpha = alpha;
  est.samples = samples;
  est.clamp_count = clamps.load();
  double sum = 0;
  for (double v : values) sum += v;
  est.mean = sum / samples;
  double var = 0;
  for (double v : values) var += (v - est.mean) * (v - est.mean);
  est.stderr_ = samples > 1 ? std::sqrt(var / samples / (samples - 1)) : 0.0;
  return est;
}

std::array<double, 3> sample_beta_measure(const Population& pop, double alpha,
                                          Rng& rng) {
  const int k = pop.k;
  const double lam = alpha * k / 2.0;
  const double* prev = pop.samples.data();
  const size_t n = pop.samples.size();
  auto side = [&]() {
    int64_t d = rng.poisson(lam);
    double prod = 1.0;
    for (int64_t c = 0; c < d; c++) {
      double u = 1.0;
      for (int j = 0; j + 1 < k; j++) u *= prev[rng.below(n)];
      prod *= 1.0 - u;
      if (prod < 1e-290) prod = 1e-290;
    }
    return prod;
  };
  double pp = side();
  double pm = side();
  double z = pp + pm - pp * pm;
  return {(1.0 - pp) * pm / z, (1.0 - pm) * pp / z, pp * pm / z};
}

ColTerms col_terms(const std::vector<std::vector<double>>& eta_plus,
                   const std::vector<std::vector<double>>& eta_minus,
                   const std::vector<double>& eta_k) {
  const int k = static_cast<int>(eta_k.size());
  if (k < 2) throw std::invalid_argument("col_terms: eta_k must have k >= 2 entries");
  auto side = [&](const std::vector<std::vector<double>>& rows, double* denom) {
    double prod = 1.0;
    for (const auto& row : rows) {
      double u = 1.0;
      for (double e : row) u *= e;
      prod *= 1.0 - u;
      *denom *= 3.0 - 2.0 * u;
    }
    return prod;
  };
  ColTerms t;
  double denom = 1.0;
  double pp = side(eta_plus, &denom);
  double pm = side(eta_minus, &denom);
  t.z_dot = (pp + pm - pp * pm) / denom;

  double prod_k = 1.0, denom_k = 1.0, uhat = 1.0;
  for (int j = 0; j < k; j++) {
    prod_k *= eta_k[j];
    denom_k *= 2.0 - eta_k[j];
    if (j + 1 < k) uhat *= eta_k[j];
  }
  t.z_hat = (1.0 - prod_k) / denom_k;
  t.z_bar = (1.0 - prod_k) / ((3.0 - 2.0 * uhat) * (2.0 - eta_k[k - 1]));
  return t;
}

double col_zdot_oracle(const std::vector<ColorDist4>& qhat_plus,
                       const std::vector<ColorDist4>& qhat_minus) {
  const size_t d = qhat_plus.size() + qhat_minus.size();
  if (d > 12) throw BudgetExceeded("budget: col_zdot_oracle degree > 12");
  std::vector<uint8_t> colors(d);
  std::vector<int8_t> signs(d);
  std::vector<const ColorDist4*> q(d);
  for (size_t i = 0; i < qhat_plus.size(); i++) {
    signs[i] = 1;
    q[i] = &qhat_plus[i];
  }
  for (size_t i = 0; i < qhat_minus.size(); i++) {
    signs[qhat_plus.size() + i] = -1;
    q[qhat_plus.size() + i] = &qhat_minus[i];
  }
  double total = 0;
  size_t count = 1;
  for (size_t i = 0; i < d; i++) count *= 4;
  for (size_t code = 0; code < count; code++) {
    size_t c = code;
    for (size_t i = 0; i < d; i++) {
      colors[i] = static_cast<uint8_t>(c & 3);
      c >>= 2;
    }
    if (!variable_factor(colors, signs).valid) continue;
    double w = 1.0;
    for (size_t i = 0; i < d; i++) w *= (*q[i])[colors[i]];
    total += w;
  }
  return total;
}

double col_zhat_oracle(const std::vector<ColorDist4>& qdot) {
  const size_t k = qdot.size();
  if (k > 12) throw BudgetExceeded("budget: col_zhat_oracle degree > 12");
  std::vector<uint8_t> colors(k);
  double total = 0;
  size_t count = 1;
  for (size_t i = 0; i < k; i++) count *= 4;
  for (size_t code = 0; code < count; code++) {
    size_t c = code;
    for (size_t i = 0; i < k; i++) {
      colors[i] = static_cast<uint8_t>(c & 3);
      c >>= 2;
    }
    if (!clause_factor(colors)) continue;
    double w = 1.0;
    for (size_t i = 0; i < k; i++) w *= qdot[i][colors[i]];
    total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------

double ThresholdConfig::lbd() const {
  return alpha_lbd > 0 ? alpha_lbd : std::pow(2.0, k) * std::log(2.0) - 2.0;
}
double ThresholdConfig::ubd() const {
  return alpha_ubd > 0 ? alpha_ubd : std::pow(2.0, k) * std::log(2.0);
}

namespace {

struct MeanSe {
  double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  const size_t n = values.size();
  double sum = 0;
  for (double v : values) sum += v;
  r.mean = sum / n;
  double var = 0;
  for (double v : values) var += (v - r.mean) * (v - r.mean);
  r.se = n > 1 ? std::sqrt(var / n / (n - 1)) : 0.0;
  return r;
}

// E[log(Pi+ + Pi- - Pi+Pi-)] at `alpha` with the coupled degree layout
MeanSe numerator_estimate(const Population& pop, double alpha, double base,
                          int64_t samples, uint64_t seed, int workers) {
  const int k = pop.k;
  const double lam_base = base * k / 2.0;
  const double lam_inc = (alpha - base) * k / 2.0;
  const double* prev = pop.samples.data();
  const size_t n = pop.samples.size();
  const uint64_t root_key = Rng::stream(seed, {kTagPhi}).key();
  std::vector<double> values(static_cast<size_t>(samples));
  parallel_for(values.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++) {
      uint64_t key_i = Rng::derive(root_key, i);
      Rng rng_d(Rng::derive(key_i, kBranchDegrees));
      int64_t dp = rng_d.poisson(lam_base);
      int64_t dm = rng_d.poisson(lam_base);
      if (lam_inc > 0) {
        Rng rng_inc(Rng::derive(key_i, kBranchIncrement));
        dp += poisson_inverse(lam_inc, rng_inc.unit_at(0));
        dm += poisson_inverse(lam_inc, rng_inc.unit_at(1));
      }
      Rng ep(Rng::derive(key_i, kBranchEtaPlus));
      Rng em(Rng::derive(key_i, kBranchEtaMinus));
      double pp = side_product_indexed(prev, n, ep, dp, k);
      double pm = side_product_indexed(prev, n, em, dm, k);
      values[i] = std::log(std::max(kLogFloor, pp + pm - pp * pm));
    }
  });
  return mean_se(values);
}

// E[num(alpha_hi on pop_hi) - num(alpha_lo on pop_lo)] under shared streams
MeanSe numerator_diff(const Population& pop_lo, double alpha_lo,
                      const Population& pop_hi, double alpha_hi, double base,
                      int64_t samples, uint64_t seed, int workers) {
  const int k = pop_lo.k;
  const double lam_base = base * k / 2.0;
  const double inc_lo = (alpha_lo - base) * k / 2.0;
  const double inc_hi = (alpha_hi - base) * k / 2.0;
  const double* lo = pop_lo.samples.data();
  const double* hi = pop_hi.samples.data();
  const size_t n_lo = pop_lo.samples.size();
  const size_t n_hi = pop_hi.samples.size();
  const uint64_t root_key = Rng::stream(seed, {kTagPhi}).key();
  std::vector<double> values(static_cast<size_t>(samples));
  parallel_for(values.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++) {
      uint64_t key_i = Rng::derive(root_key, i);
      Rng rng_d(Rng::derive(key_i, kBranchDegrees));
      int64_t dp = rng_d.poisson(lam_base);
      int64_t dm = rng_d.poisson(lam_base);
      Rng rng_inc(Rng::derive(key_i, kBranchIncrement));
      int64_t dp_lo = dp, dm_lo = dm, dp_hi = dp, dm_hi = dm;
      if (inc_lo > 0) {
        dp_lo += poisson_inverse(inc_lo, rng_inc.unit_at(0));
        dm_lo += poisson_inverse(inc_lo, rng_inc.unit_at(1));
      }
      if (inc_hi > 0) {
        dp_hi += poisson_inverse(inc_hi, rng_inc.unit_at(0));
        dm_hi += poisson_inverse(inc_hi, rng_inc.unit_at(1));
      }
      Rng ep(Rng::derive(key_i, kBranchEtaPlus));
      Rng em(Rng::derive(key_i, kBranchEtaMinus));
      double pp_lo = side_product_indexed(lo, n_lo, ep, dp_lo, k);
      double pm_lo = side_product_indexed(lo, n_lo, em, dm_lo, k);
      double pp_hi = side_product_indexed(hi, n_hi, ep, dp_hi, k);
      double pm_hi = side_product_indexed(hi, n_hi, em, dm_hi, k);
      values[i] = std::log(std::max(kLogFloor, pp_hi + pm_hi - pp_hi * pm_hi)) -
                  std::log(std::max(kLogFloor, pp_lo + pm_lo - pp_lo * pm_lo));
    }
  });
  return mean_se(values);
}

// E[log(1 - prod_{j<=k} eta_j)], unscaled; indices shared across probes
MeanSe denominator_estimate(const Population& pop, int64_t draws,
                            uint64_t seed, int workers) {
  const int k = pop.k;
  const double* prev = pop.samples.data();
  const size_t n = pop.samples.size();
  const uint64_t key = Rng::stream(seed, {0xDE}).key();
  const int64_t chunk = 1 << 20;
  const size_t chunks = static_cast<size_t>((draws + chunk - 1) / chunk);
  std::vector<double> csum(chunks, 0.0), csq(chunks, 0.0);
  Rng stream(key);
  parallel_for(chunks, workers, [&](size_t begin, size_t end) {
    for (size_t c = begin; c < end; c++) {
      int64_t lo = static_cast<int64_t>(c) * chunk;
      int64_t hi = std::min<int64_t>(draws, lo + chunk);
      double s = 0, sq = 0;
      for (int64_t i = lo; i < hi; i++) {
        double u = 1.0;
        uint64_t base = static_cast<uint64_t>(i) * k;
        for (int j = 0; j < k; j++)
          u *= prev[Rng::map_below(stream.at(base + j), n)];
        double v = std::log1p(-std::min(u, 1.0 - kLogFloor));
        s += v;
        sq += v * v;
      }
      csum[c] = s;
      csq[c] = sq;
    }
  });
  double sum = 0, sq = 0;
  for (size_t c = 0; c < chunks; c++) {
    sum += csum[c];
    sq += csq[c];
  }
  MeanSe r;
  r.mean = sum / draws;
  double var = std::max(0.0, sq / draws - r.mean * r.mean);
  r.se = std::sqrt(var / (draws - 1));
  return r;
}

Population converge_population(const ThresholdConfig& cfg, double alpha) {
  const double base = cfg.lbd();
  size_t burn_n = std::min(cfg.burn_pop ? cfg.burn_pop : cfg.pop_size, cfg.pop_size);
  Population pop = population_delta_half(cfg.k, alpha, burn_n);
  EvolveOptions eo;
  eo.workers = cfg.workers;
  eo.alpha_base = base;
  const uint64_t evolve_seed = Rng::derive(cfg.seed, 0xA11CE);
  double w1_threshold = cfg.w1_stop / std::sqrt(static_cast<double>(burn_n));
  int iters = 0;
  while (iters < cfg.max_iters) {
    Population next = evolve(pop, 1, evolve_seed, eo);
    iters++;
    double w1 = wasserstein1(pop, next);
    pop = std::move(next);
    if (iters >= cfg.min_iters && w1 < w1_threshold) break;
  }
  if (pop.size() != cfg.pop_size) {
    EvolveOptions grow = eo;
    grow.resize = cfg.pop_size;
    pop = evolve(pop, 1, evolve_seed, grow);
    iters++;
  }
  for (int i = 1; i < cfg.final_iters; i++) pop = evolve(pop, 1, evolve_seed, eo);
  pop.iter = static_cast<uint32_t>(iters);  // probe bookkeeping
  return pop;
}

}  // namespace

ThresholdResult find_threshold(const ThresholdConfig& cfg) {
  if (cfg.k < 3) throw std::invalid_argument("find_threshold: k >= 3 required");
  ThresholdResult res;
  const int k = cfg.k;
  double lo = cfg.lbd(), hi = cfg.ubd();
  if (!(lo < hi)) throw std::invalid_argument("find_threshold: empty bracket");
  const double base = lo;
  const int64_t den_default = cfg.den_draws > 0 ? cfg.den_draws : 400 * cfg.samples;
  const uint64_t num_seed = Rng::derive(cfg.seed, 0xFEE);
  const uint64_t den_seed = Rng::derive(cfg.seed, 0xDE11);

  // anchor: population and numerator at alpha_lbd, with budget doubling
  Population pop_lo = converge_population(cfg, lo);
  int index = 0;
  MeanSe anchor, den_lo;
  ThresholdProbe plo;
  {
    int64_t budget = cfg.samples;
    int64_t dbudget = den_default;
    for (int attempt = 0; attempt <= cfg.max_retries; attempt++) {
      anchor = numerator_estimate(pop_lo, lo, base, budget, num_seed, cfg.workers);
      den_lo = denominator_estimate(pop_lo, dbudget, den_seed, cfg.workers);
      plo.index = index;
      plo.alpha = lo;
      plo.pop_size = pop_lo.size();
      plo.iters = pop_lo.iter;
      plo.samples = budget;
      plo.phi_mean = anchor.mean - lo * (k - 1) * den_lo.mean;
      plo.phi_stderr = std::sqrt(anchor.se * anchor.se +
                                 std::pow(lo * (k - 1) * den_lo.se, 2));
      plo.decided = std::abs(plo.phi_mean) > 3.0 * plo.phi_stderr;
      if (plo.decided) break;
      budget *= 2;
      dbudget *= 2;
    }
  }
  index++;
  res.probes.push_back(plo);
  if (!plo.decided || plo.phi_mean <= 0) {
    res.failure = "bracket failure: Phi(alpha_lbd) not positive with 3 sigma";
    res.alpha_star = lo;
    return res;
  }

  // any other probe: anchor + paired numerator difference - scaled denominator
  auto eval_probe = [&](double alpha) {
    Population pop = converge_population(cfg, alpha);
    ThresholdProbe probe;
    probe.index = index++;
    probe.alpha = alpha;
    probe.pop_size = pop.size();
    probe.iters = pop.iter;
    int64_t dbudget = cfg.diff_samples;
    int64_t den_budget = den_default;
    for (int attempt = 0; attempt <= cfg.max_retries; attempt++) {
      MeanSe diff = numerator_diff(pop_lo, lo, pop, alpha, base, dbudget,
                                   num_seed, cfg.workers);
      MeanSe den = denominator_estimate(pop, den_budget, den_seed, cfg.workers);
      probe.samples = dbudget;
      probe.phi_mean = anchor.mean + diff.mean - alpha * (k - 1) * den.mean;
      probe.phi_stderr =
          std::sqrt(anchor.se * anchor.se + diff.se * diff.se +
                    std::pow(alpha * (k - 1) * den.se, 2));
      probe.decided = std::abs(probe.phi_mean) > 3.0 * probe.phi_stderr;
      if (probe.decided) break;
      dbudget *= 2;
      den_budget *= 2;
    }
    return probe;
  };

  ThresholdProbe phi_hi = eval_probe(hi);
  res.probes.push_back(phi_hi);
  if (!phi_hi.decided || phi_hi.phi_mean >= 0) {
    res.failure = "bracket failure: Phi(alpha_ubd) not negative with 3 sigma";
    res.alpha_star = hi;
    return res;
  }
  res.bracket_ok = true;

  while (hi - lo > cfg.tol) {
    double mid = 0.5 * (lo + hi);
    ThresholdProbe pm = eval_probe(mid);
    res.probes.push_back(pm);
    if (!pm.decided) break;  // Phi statistically indistinguishable from 0
    if (pm.phi_mean > 0)
      lo = mid;
    else
      hi = mid;
  }
  res.alpha_star = 0.5 * (lo + hi);
  return res;
}

std::string threshold_audit_csv(const ThresholdResult& res,
                                const ThresholdConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "probe,alpha,phi_mean,phi_stderr,pop_size,iters,seed\n";
  for (const auto& p : res.probes)
    out << p.index << "," << p.alpha << "," << p.phi_mean << ","
        << p.phi_stderr << "," << p.pop_size << "," << p.iters << ","
        << cfg.seed << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

// r(x | rho) = e^{rho x} / (2 cosh rho)
inline double r_weight(int8_t x, double rho) {
  return 1.0 / (1.0 + std::exp(-2.0 * rho * x));
}

}  // namespace

double interp_u_given(const std::vector<int8_t>& theta_signs,
                      const std::vector<double>& rho_k_minus_1, double beta,
                      int8_t x) {
  const size_t k = theta_signs.size();
  if (rho_k_minus_1.size() + 1 != k)
    throw std::invalid_argument("interp_u_given: need k-1 rho entries");
  if (x != static_cast<int8_t>(-theta_signs[k - 1])) return 1.0;
  double p = 1.0;
  for (size_t j = 0; j + 1 < k; j++)
    p *= r_weight(static_cast<int8_t>(-theta_signs[j]), rho_k_minus_1[j]);
  return 1.0 - (1.0 - std::exp(-beta)) * p;
}

InterpU interp_u(const std::vector<int8_t>& theta_signs,
                 const std::vector<double>& rho, double beta) {
  const size_t k = theta_signs.size();
  if (rho.size() != k) throw std::invalid_argument("interp_u: need k rho entries");
  std::vector<double> rho_head(rho.begin(), rho.end() - 1);
  InterpU u;
  double rp = r_weight(1, rho[k - 1]);
  double rm = r_weight(-1, rho[k - 1]);
  u.u_plus = rp * interp_u_given(theta_signs, rho_head, beta, 1);
  u.u_minus = rm * interp_u_given(theta_signs, rho_head, beta, -1);
  u.u_total = u.u_plus + u.u_minus;
  return u;
}

InterpEstimate interp_bound(const InterpConfig& cfg, const Population& pop) {
  if (!(cfg.m > 0.0) || cfg.m >= 1.0)
    throw std::invalid_argument("interp_bound: m in (0,1) required");
  if (cfg.inner < 2 || cfg.outer < 2)
    throw std::invalid_argument("interp_bound: inner and outer must be >= 2");
  const int k = cfg.k;
  if (pop.k != k) throw std::invalid_argument("interp_bound: population k mismatch");
  const double beta = cfg.beta;
  const double m = cfg.m;
  const uint64_t root_key = Rng::stream(cfg.seed, {kTagInterp}).key();

  std::vector<double> values(cfg.outer);
  std::atomic<bool> bad{false};
  parallel_for(static_cast<size_t>(cfg.outer), cfg.workers,
               [&](size_t begin, size_t end) {
    for (size_t r = begin; r < end; r++) {
      Rng rng(Rng::derive(root_key, r));
      int64_t d = rng.poisson(cfg.alpha * k);
      // clause signs and bη weights for the first functional
      std::vector<int8_t> signs(static_cast<size_t>(d) * k);
      for (auto& s : signs) s = rng.sign();
      std::vector<std::array<double, 3>> betas(static_cast<size_t>(d) * (k - 1));
      for (auto& b : betas) b = sample_beta_measure(pop, cfg.alpha, rng);
      // second functional: one clause with k weights
      std::vector<int8_t> signs0(k);
      for (auto& s : signs0) s = rng.sign();
      std::vector<std::array<double, 3>> betas0(k);
      for (auto& b : betas0) b = sample_beta_measure(pop, cfg.alpha, rng);

      auto rho_of = [&](const std::array<double, 3>& bm, double u) {
        // y ~ bm over (+,-,f); rho_y = (beta, -beta, 0)
        if (u < bm[0]) return beta;
        if (u < bm[0] + bm[1]) return -beta;
        return 0.0;
      };

      // inner expectation via log-sum-exp
      double max1 = -1e300, max2 = -1e300;
      std::vector<double> l1(cfg.inner), l2(cfg.inner);
      for (int64_t it = 0; it < cfg.inner; it++) {
        double ls_plus = 0.0, ls_minus = 0.0;
        for (int64_t a = 0; a < d; a++) {
          const int8_t* sa = &signs[a * k];
          double p = 1.0;
          for (int j = 0; j + 1 < k; j++) {
            double rho = rho_of(betas[a * (k - 1) + j], rng.unit());
            p *= r_weight(static_cast<int8_t>(-sa[j]), rho);
          }
          double dent = (1.0 - std::exp(-beta)) * p;
          // u_a(x) = 1 - dent when x = -L_{a,k}, else 1
          if (sa[k - 1] == 1)
            ls_minus += std::log1p(-dent);
          else
            ls_plus += std::log1p(-dent);
        }
        double mx = std::max(ls_plus, ls_minus);
        double log_s = mx + std::log(std::exp(ls_plus - mx) + std::exp(ls_minus - mx));
        l1[it] = m * log_s;
        max1 = std::max(max1, l1[it]);

        double p0 = 1.0;
        for (int j = 0; j < k; j++) {
          double rho = rho_of(betas0[j], rng.unit());
          p0 *= r_weight(static_cast<int8_t>(-signs0[j]), rho);
        }
        double u0 = 1.0 - (1.0 - std::exp(-beta)) * p0;
        l2[it] = m * std::log(u0);
        max2 = std::max(max2, l2[it]);
      }
      double s1 = 0, s2 = 0;
      for (int64_t it = 0; it < cfg.inner; it++) {
        s1 += std::exp(l1[it] - max1);
        s2 += std::exp(l2[it] - max2);
      }
      if (!(s2 > 0)) {
        bad.store(true);
        return;
      }
      double log_e1 = max1 + std::log(s1) - std::log(static_cast<double>(cfg.inner));
      double log_e2 = max2 + std::log(s2) - std::log(static_cast<double>(cfg.inner));
      values[r] = log_e1 / m - (k - 1) * cfg.alpha * log_e2 / m;
    }
  });
  if (bad.load())
    throw std::runtime_error("interp_bound: nonpositive inner estimate of E'[(u0)^m]");
  InterpEstimate est;
  est.outer = cfg.outer;
  double sum = 0;
  for (double v : values) sum += v;
  est.mean = sum / cfg.outer;
  double var = 0;
  for (double v : values) var += (v - est.mean) * (v - est.mean);
  est.stderr_ = std::sqrt(var / cfg.outer / (cfg.outer - 1));
  return est;
}

}  // namespace ksat
