#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ksat/free_energy.hpp"
#include "ksat/tree_bp.hpp"

using namespace ksat;

namespace {

// 2^k enumeration oracle for the interpolation clause weights
InterpU interp_u_enum(const std::vector<int8_t>& signs,
                      const std::vector<double>& rho, double beta) {
  const int k = static_cast<int>(signs.size());
  InterpU u{0, 0, 0};
  for (int code = 0; code < (1 << k); code++) {
    double w = 1.0;
    bool all_false = true;
    for (int j = 0; j < k; j++) {
      int8_t xj = (code >> j) & 1 ? 1 : -1;
      w *= std::exp(rho[j] * xj) / (2.0 * std::cosh(rho[j]));
      if (signs[j] * xj != -1) all_false = false;
    }
    if (all_false) w *= std::exp(-beta);
    if ((code >> (k - 1)) & 1)
      u.u_plus += w;
    else
      u.u_minus += w;
  }
  u.u_total = u.u_plus + u.u_minus;
  return u;
}

}  // namespace

TEST_CASE("phi estimate is exactly zero on the all-zero population") {
  auto pop = population_constant(3, 4.0, 1000, 0.0);
  auto est = phi_estimate(pop, 4.0, 5000, 77);
  CHECK(est.mean == 0.0);
  CHECK(est.stderr_ == 0.0);
  CHECK(est.clamp_count == 0);
}

TEST_CASE("phi estimate matches the exact Poisson sum at delta-1/2") {
  // at the delta_{1/2} population, Pi± = (1 - 2^{1-k})^{d±}; the expectation
  // is an explicit double Poisson sum plus the constant denominator term
  const int k = 3;
  const double alpha = 4.0;
  const double lam = alpha * k / 2.0;
  const double s = 1.0 - std::pow(2.0, -(k - 1));
  double expect = 0.0;
  for (int dp = 0; dp < 80; dp++) {
    for (int dm = 0; dm < 80; dm++) {
      double logp = -2 * lam + (dp + dm) * std::log(lam) - log_factorial(dp) -
                    log_factorial(dm);
      double pp = std::pow(s, dp), pm = std::pow(s, dm);
      expect += std::exp(logp) * std::log(pp + pm - pp * pm);
    }
  }
  expect -= alpha * (k - 1) * std::log1p(-std::pow(2.0, -k));
  // the constant term alone is the spec's hand value for the d=0 draw
  CHECK(-alpha * (k - 1) * std::log1p(-std::pow(2.0, -k)) ==
        doctest::Approx(1.068251140996181).epsilon(1e-12));

  auto pop = population_delta_half(k, alpha, 50000);
  auto est = phi_estimate(pop, alpha, 400000, 5);
  CHECK(std::abs(est.mean - expect) < 4 * est.stderr_);

  // two seeds agree within the combined band
  auto est2 = phi_estimate(pop, alpha, 400000, 6);
  CHECK(std::abs(est.mean - est2.mean) < 3 * (est.stderr_ + est2.stderr_));

  // alpha = 0: no clauses, no denominator weight
  auto est0 = phi_estimate(pop, 0.0, 1000, 7);
  CHECK(est0.mean == 0.0);
}

TEST_CASE("coupled randomness orders phi estimates across densities") {
  const int k = 8;
  const double a_lo = std::pow(2.0, k) * std::log(2.0) - 2.0;
  const double a_hi = a_lo + 1.0;
  int ordered = 0;
  for (uint64_t seed = 1; seed <= 2; seed++) {
    auto lo = population_delta_half(k, a_lo, 20000);
    auto hi = population_delta_half(k, a_hi, 20000);
    auto [pl, ph] = coupled_evolve(lo, hi, a_lo, a_hi, 12, seed);
    auto el = phi_estimate(pl, a_lo, 20000, seed + 50, 0, a_lo);
    auto eh = phi_estimate(ph, a_hi, 20000, seed + 50, 0, a_lo);
    if (el.mean >= eh.mean) ordered++;
  }
  CHECK(ordered == 2);
}

TEST_CASE("color-model terms: hand values") {
  // z_hat at k=3, all etas 1/2: (1 - 1/8) / (3/2)^3 = 7/27
  ColTerms t = col_terms({}, {}, {0.5, 0.5, 0.5});
  CHECK(t.z_hat == doctest::Approx(7.0 / 27).epsilon(1e-15));
  // z_dot with no clauses: empty products give 1
  CHECK(t.z_dot == 1.0);
  // z_bar with uhat = 0 and eta_k(-) = 0: 1/(3*2) = 1/6
  ColTerms t2 = col_terms({}, {}, {0.0, 0.0, 0.0});
  CHECK(t2.z_bar == doctest::Approx(1.0 / 6).epsilon(1e-15));
}

TEST_CASE("color-model terms equal the enumeration oracles") {
  Rng rng = Rng::stream(1234, {9});
  const int k = 4;
  for (int trial = 0; trial < 120; trial++) {
    int dp = static_cast<int>(rng.below(3));
    int dm = static_cast<int>(rng.below(3));
    std::vector<std::vector<double>> etap(dp), etam(dm);
    std::vector<ColorDist4> qhat_p, qhat_m;
    for (auto* rows : {&etap, &etam}) {
      for (auto& row : *rows) {
        row.resize(k - 1);
        for (auto& e : row) e = rng.unit() * 0.98;
      }
    }
    for (const auto& row : etap) {
      double u = 1;
      for (double e : row) u *= e;
      qhat_p.push_back(qhat_from_uhat(u));
    }
    for (const auto& row : etam) {
      double u = 1;
      for (double e : row) u *= e;
      qhat_m.push_back(qhat_from_uhat(u));
    }
    std::vector<double> etak(k);
    for (auto& e : etak) e = rng.unit() * 0.98;
    ColTerms t = col_terms(etap, etam, etak);
    CHECK(std::abs(t.z_dot - col_zdot_oracle(qhat_p, qhat_m)) < 1e-12);
    // clause oracle: q-dots from random full measures with the given minus
    // mass (plus/free split arbitrary)
    std::vector<ColorDist4> qdots;
    for (int j = 0; j < k; j++) {
      double split = rng.unit();
      std::array<double, 3> beta{(1 - etak[j]) * split, etak[j],
                                 (1 - etak[j]) * (1 - split)};
      qdots.push_back(qdot_from_eta(beta));
    }
    CHECK(std::abs(t.z_hat - col_zhat_oracle(qdots)) < 1e-12);
  }
  // point mass on yellow: only the all-yellow variable pattern could count,
  // and it is invalid, so the variable term vanishes
  ColorDist4 y{0, 1, 0, 0};
  CHECK(col_zdot_oracle({y}, {y}) == 0.0);
  // forcing survives: one red with the rest yellow on the clause side
  ColorDist4 r{1, 0, 0, 0};
  std::vector<ColorDist4> qd{r, y, y};
  CHECK(col_zhat_oracle(qd) == 1.0);
}

TEST_CASE("small threshold run brackets and bisects deterministically") {
  ThresholdConfig cfg;
  cfg.k = 6;
  cfg.pop_size = 20000;
  cfg.burn_pop = 5000;
  cfg.tol = 0.25;
  cfg.samples = 40000;
  cfg.min_iters = 6;
  cfg.max_iters = 25;
  cfg.seed = 3;
  auto res = find_threshold(cfg);
  REQUIRE(res.bracket_ok);
  CHECK(res.alpha_star > cfg.lbd());
  CHECK(res.alpha_star < cfg.ubd());
  CHECK(res.probes.size() >= 3);
  CHECK(res.probes[0].phi_mean > 0);
  CHECK(res.probes[1].phi_mean < 0);
  auto res2 = find_threshold(cfg);
  CHECK(res.alpha_star == res2.alpha_star);
  auto csv = threshold_audit_csv(res, cfg);
  CHECK(csv.find("probe,alpha,phi_mean,phi_stderr,pop_size,iters,seed") == 0);

  // artificial bracket entirely above the root: endpoint test must fail
  ThresholdConfig bad = cfg;
  bad.alpha_lbd = bad.ubd() - 0.4;
  bad.alpha_ubd = bad.ubd() - 0.2;
  auto fail = find_threshold(bad);
  CHECK_FALSE(fail.bracket_ok);
  CHECK(!fail.failure.empty());
}

TEST_CASE("interpolation clause weights: hand cases and enumeration") {
  // beta = 0 with rho = 0: both halves 1/2, total 1
  std::vector<int8_t> signs{1, -1, 1};
  std::vector<double> rho0{0, 0, 0};
  auto u = interp_u(signs, rho0, 0.0);
  CHECK(u.u_plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.u_minus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.u_total == doctest::Approx(1.0).epsilon(1e-15));

  // rho = 0, any theta and beta: u_total = 1 - (1 - e^-beta) 2^-k
  for (double beta : {0.5, 1.0, 3.0}) {
    auto ub = interp_u(signs, rho0, beta);
    CHECK(ub.u_total ==
          doctest::Approx(1.0 - (1.0 - std::exp(-beta)) / 8.0).epsilon(1e-14));
  }

  // k=2 hand case against the 4-term enumeration
  std::vector<int8_t> s2{-1, -1};
  std::vector<double> r2{1.0, 1.0};
  auto closed = interp_u(s2, r2, 1.0);
  auto enumd = interp_u_enum(s2, r2, 1.0);
  CHECK(closed.u_plus == doctest::Approx(enumd.u_plus).epsilon(1e-12));
  CHECK(closed.u_minus == doctest::Approx(enumd.u_minus).epsilon(1e-12));

  // random cases across k
  Rng rng = Rng::stream(5150, {2});
  for (int trial = 0; trial < 120; trial++) {
    int k = 2 + static_cast<int>(rng.below(11));
    std::vector<int8_t> st(k);
    std::vector<double> rh(k);
    for (auto& x : st) x = rng.sign();
    for (auto& x : rh) x = 4.0 * rng.unit() - 2.0;
    double beta = 5.0 * rng.unit();
    auto a = interp_u(st, rh, beta);
    auto b = interp_u_enum(st, rh, beta);
    CHECK(std::abs(a.u_plus - b.u_plus) < 1e-12);
    CHECK(std::abs(a.u_minus - b.u_minus) < 1e-12);
    CHECK(std::abs(a.u_total - b.u_total) < 1e-12);
  }
}

TEST_CASE("interpolation bound: degenerate values and seed stability") {
  auto pop = evolve(population_delta_half(4, 8.0, 20000), 12, 9);
  InterpConfig cfg;
  cfg.k = 4;
  cfg.alpha = 8.0;
  cfg.beta = 0.0;
  cfg.m = 0.3;
  cfg.outer = 50;
  cfg.inner = 50;
  cfg.seed = 4;
  auto est = interp_bound(cfg, pop);
  CHECK(std::abs(est.mean - std::log(2.0)) < 1e-12);
  CHECK(est.stderr_ < 1e-12);

  // alpha = 0: no clauses at all, the estimator returns ln 2 at any beta
  auto pop0 = population_delta_half(4, 0.0, 1000);
  InterpConfig czero = cfg;
  czero.alpha = 0.0;
  czero.beta = 2.5;
  auto e0 = interp_bound(czero, pop0);
  CHECK(std::abs(e0.mean - std::log(2.0)) < 1e-12);

  // seed stability within 3 sigma at a nontrivial configuration
  InterpConfig c1;
  c1.k = 4;
  c1.alpha = 8.0;
  c1.beta = 8.0;
  c1.m = 1.0 / std::sqrt(8.0);
  c1.outer = 300;
  c1.inner = 200;
  c1.seed = 11;
  auto ea = interp_bound(c1, pop);
  InterpConfig c2 = c1;
  c2.seed = 12;
  auto eb = interp_bound(c2, pop);
  CHECK(std::abs(ea.mean - eb.mean) < 3 * (ea.stderr_ + eb.stderr_));
  CHECK(std::isfinite(ea.mean));
}

TEST_CASE("beta measure samples are probability vectors") {
  auto pop = evolve(population_delta_half(4, 8.0, 10000), 8, 2);
  Rng rng = Rng::stream(77, {1});
  for (int i = 0; i < 200; i++) {
    auto b = sample_beta_measure(pop, 8.0, rng);
    CHECK(b[0] >= 0);
    CHECK(b[1] >= 0);
    CHECK(b[2] >= 0);
    CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0).epsilon(1e-12));
  }
}
