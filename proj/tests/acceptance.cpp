// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
// Usage: acceptance [--only 1,2,...] [--workers w]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "ksat/cluster_models.hpp"
#include "ksat/factor_graph.hpp"
#include "ksat/free_energy.hpp"
#include "ksat/moments.hpp"
#include "ksat/popdyn.hpp"
#include "ksat/preprocess.hpp"
#include "ksat/rational.hpp"
#include "ksat/tree_bp.hpp"
#include "tree_gibbs.hpp"

using namespace ksat;

namespace {

int g_workers = 0;
std::vector<std::string> g_notes;

void note(const std::string& s) { g_notes.push_back(s); }

bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// tautology-free instance sampler shared by criteria 4 and 5 (a clause with
// both signs of one variable can block a variable without constraining its
// cluster, which breaks the coarsen/cluster correspondence)
FactorGraph sample_lab_instance(uint64_t seed) {
  Rng rng = Rng::stream(seed, {0x1ab});
  int n = 3 + static_cast<int>(rng.below(8));       // 3..10
  int m = static_cast<int>(rng.below(13));          // 0..12
  std::vector<std::vector<Lit>> cls;
  while (static_cast<int>(cls.size()) < m) {
    std::vector<Lit> c(3);
    bool taut = false;
    for (int j = 0; j < 3; j++)
      c[j] = Lit{1 + static_cast<int>(rng.below(n)), rng.sign()};
    for (int i = 0; i < 3; i++)
      for (int j = i + 1; j < 3; j++)
        if (c[i].var == c[j].var && c[i].sign != c[j].sign) taut = true;
    if (!taut) cls.push_back(std::move(c));
  }
  return FactorGraph(n, 3, std::move(cls));
}

// ---------------------------------------------------------------------------

bool criterion1() {
  int points = 0;
  for (int k = 2; k <= 12; k++) {
    double a1 = alpha1_root(k);
    for (int j = 1; j <= 9 && points < 100; j++) {
      double alpha = a1 * j / 9.0;
      points++;
      if (!approx(phi_z(k, alpha, 0.5), 2 * phi1(k, alpha), 1e-12)) return false;
      if (!approx(phi_z(k, alpha, 1.0), phi1(k, alpha), 1e-12)) return false;
      if (!approx(phi_z(k, alpha, 0.0), psi1(k, alpha), 1e-12)) return false;
      const double h = 1e-5;
      double dpsi = (psi_z(k, alpha, 0.5 + h) - psi_z(k, alpha, 0.5 - h)) / (2 * h);
      if (std::abs(dpsi) > 1e-8) return false;
      double dphi = (phi_z(k, alpha, 0.5 + h) - phi_z(k, alpha, 0.5 - h)) / (2 * h);
      if (!(dphi > 0)) return false;
    }
  }
  return points == 99 || points == 100;
}

bool criterion2() {
  for (int n = 1; n <= 4; n++)
    for (int m = 0; m <= 3; m++)
      for (int k = 2; k <= 3; k++)
        for (int nz = 0; nz <= n; nz++) {
          if (!(exact_pair_moment_rational(n, m, k, nz) ==
                brute_force_pair_moment_rational(n, m, k, nz)))
            return false;
        }
  return true;
}

bool criterion3() {
  // closed form vs independent bisection
  double closed = alpha1_root(3);
  double lo = 1.0, hi = 64.0;
  for (int i = 0; i < 80; i++) {
    double mid = 0.5 * (lo + hi);
    if (phi1(3, mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(closed - 0.5 * (lo + hi)) > 1e-9) return false;
  if (std::abs(closed - 5.1908930696844315) > 1e-9) return false;
  for (int k = 2; k <= 16; k++)
    if (!(alpha1_root(k) < std::pow(2.0, k) * std::log(2.0))) return false;
  return true;
}

bool criterion4() {
  for (uint64_t seed = 0; seed < 500; seed++) {
    auto g = sample_lab_instance(seed);
    auto frozen = enumerate_frozen(g);
    auto warnings = enumerate_warnings(g);
    auto colorings = enumerate_colorings(g);
    if (frozen.size() != warnings.size()) return false;
    if (frozen.size() != colorings.size()) return false;
    for (const auto& x : frozen) {
      auto w = frozen_to_wp(x, g);
      if (!(wp_to_frozen(w, g) == x)) return false;
      auto c = wp_to_coloring(w, g);
      if (!(coloring_to_wp(c, g) == w)) return false;
      if (!(coloring_to_frozen(c, g) == x)) return false;
      if (!(frozen_to_coloring(x, g) == c)) return false;
    }
  }
  return true;
}

bool criterion5() {
  for (uint64_t seed = 0; seed < 500; seed++) {
    auto g = sample_lab_instance(seed);
    if (g.n() > 24) continue;
    auto sols = enumerate_solutions(g);
    auto part = clusters(sols, g.n());
    for (const auto& block : part.blocks) {
      auto first = coarsen_mask(block.front(), g);
      if (!is_valid_frozen(first, g).valid) return false;
      for (uint32_t s : block)
        if (!(coarsen_mask(s, g) == first)) return false;
    }
  }
  // the cycle gadget separates coarsen from cube at u
  auto gadget = cycle_gadget(3);
  auto sols = enumerate_solutions(gadget.graph);
  auto part = clusters(sols, gadget.graph.n());
  if (part.blocks.size() != 1) return false;
  auto cb = cube(part.blocks[0], gadget.graph.n());
  auto co = coarsen_mask(part.blocks[0].front(), gadget.graph);
  return cb.value[gadget.u] == 1 && co.value[gadget.u] == kSpinF;
}

bool criterion6() {
  int tested = 0;
  for (uint64_t seed = 0; tested < 200 && seed < 1000; seed++) {
    auto t = ksat_test::random_test_tree(seed, 30);
    auto w = ksat_test::random_weights(t, seed * 7 + 3);
    auto ms = solve_tree_bp(t, w);
    auto gb = ksat_test::gibbs_enumerate(t, w);
    if (!(gb.z > 0)) return false;
    tested++;
    auto off = tree_edge_offsets(t);
    for (int c = 0; c < t.clause_count(); c++) {
      for (int slot = 0; slot < 1 + (int)t.clauses[c].children.size(); slot++) {
        int e = off[c] + slot;
        int v = slot == 0 ? t.clauses[c].parent : t.clauses[c].children[slot - 1];
        auto pi = edge_marginal(ms.q_var[e], ms.q_cls[e]);
        for (int s = 0; s < 4; s++)
          if (std::abs(pi[s] - gb.edge_marginal[e][s]) > 1e-10) return false;
        // z-identity
        if (std::abs(ms.log_zbar_edge[e] -
                     (ms.log_zdot_var[v] - ms.log_zdot_edge[e])) > 1e-12)
          return false;
        if (std::abs(ms.log_zbar_edge[e] -
                     (ms.log_zhat_cls[c] - ms.log_zhat_edge[e])) > 1e-12)
          return false;
      }
    }
    // vertex marginals against the enumeration
    for (int v = 0; v < std::min(2, t.var_count()); v++) {
      auto vm = vertex_marginal_var(t, w, ms, v);
      for (const auto& [key, val] : gb.var_marginal[v])
        if (std::abs(vm[key] - val) > 1e-10) return false;
    }
    // weight redistribution leaves marginals unchanged
    auto wg = w;
    for (auto& lv : wg.lam_var) lv = {1.0, 1.0, 1.0};
    for (auto& lr : wg.lam_edge_r) lr = 1.0;
    auto moved = redistribute_weights(t, wg);
    auto ms1 = solve_tree_bp(t, wg);
    auto ms2 = solve_tree_bp(t, moved);
    for (int e = 0; e < tree_edge_count(t); e++) {
      auto p1 = edge_marginal(ms1.q_var[e], ms1.q_cls[e]);
      auto p2 = edge_marginal(ms2.q_var[e], ms2.q_cls[e]);
      for (int s = 0; s < 4; s++)
        if (std::abs(p1[s] - p2[s]) > 1e-10) return false;
    }
  }
  return tested == 200;
}

bool criterion7() {
  // leaf message uniform on {r,y,b}
  std::array<double, 3> lam{1.0, 1.0, 0.0};
  auto q = bp_variable({}, 1, 1.0, lam, true);
  if (!approx(q[kR], 1.0 / 3, 1e-15) || q[kG] != 0.0) return false;
  int tested = 0;
  for (uint64_t seed = 0; tested < 100 && seed < 500; seed++) {
    auto t = ksat_test::random_test_tree(seed + 3000, 28);
    tested++;
    // exact relations in rational arithmetic
    auto retas = solve_tree_etas<Rational>(t);
    for (int e = 0; e < tree_edge_count(t); e++) {
      auto qd = qdot_from_eta(retas.beta_var[e]);
      auto qh = qhat_from_uhat(retas.uhat_cls[e]);
      if (!(qh[kB] == qh[kG]) || !(qh[kB] == qh[kY])) return false;
      if (!(qd[kR] == qd[kB] + qd[kG])) return false;
    }
    // BP residual of the converted messages
    auto etas = solve_tree_etas<double>(t);
    auto ms = eta_to_messages(t, etas);
    auto w = WeightSet::identity(t);
    for (int v = 0; v < t.var_count(); v++)
      if (t.vars[v].boundary) w.lam_var[v][2] = 0.0;
    auto bp = solve_tree_bp(t, w);
    for (int e = 0; e < tree_edge_count(t); e++)
      for (int s = 0; s < 4; s++) {
        if (std::abs(ms.q_var[e][s] - bp.q_var[e][s]) > 1e-13) return false;
        if (std::abs(ms.q_cls[e][s] - bp.q_cls[e][s]) > 1e-13) return false;
      }
  }
  return tested == 100;
}

bool criterion8() {
  // exact hand cases
  RecursionDraw d0;
  if (recursion_sample(d0) != 0.0) return false;
  RecursionDraw d1;
  d1.d_minus = 1;
  d1.eta_minus = {{0.5, 0.5}};
  if (recursion_sample(d1) != 0.25) return false;
  RecursionDraw d2;
  d2.d_plus = d2.d_minus = 1;
  d2.eta_plus = {{0.5, 0.5}};
  d2.eta_minus = {{0.5, 0.5}};
  if (recursion_sample(d2) != 0.2) return false;
  // delta_0 invariance
  {
    auto z = evolve(population_constant(8, 100.0, 2000, 0.0), 2, 4);
    for (double s : z.samples)
      if (s != 0.0) return false;
  }
  // W1 contraction and tail envelopes: k in {8,10}, both bracket endpoints,
  // N = 1e5, 10 seeds, ratios for l in [5,30]
  const size_t n = 100000;
  for (int k : {8, 10}) {
    for (int side = 0; side < 2; side++) {
      double alpha = std::pow(2.0, k) * std::log(2.0) - (side == 0 ? 2.0 : 0.0);
      std::vector<std::vector<double>> ratios(31);  // index l: ratio at l
      for (uint64_t seed = 1; seed <= 10; seed++) {
        auto prev = population_delta_half(k, alpha, n);
        auto cur = evolve(prev, 1, seed, {g_workers});
        double w_prev = wasserstein1(prev, cur);
        for (int l = 2; l <= 31; l++) {
          auto next = evolve(cur, 1, seed, {g_workers});
          double w_cur = wasserstein1(cur, next);
          if (l - 1 >= 5 && l - 1 <= 30)
            ratios[l - 1].push_back(w_cur / std::max(w_prev, 1e-300));
          w_prev = w_cur;
          prev = std::move(cur);
          cur = std::move(next);
        }
        auto rep = tail_diagnostics(cur, k);
        if (rep.flags != 0) {
          note("criterion 8: tail envelope violated at k=" + std::to_string(k));
          return false;
        }
      }
      for (int l = 5; l <= 30; l++) {
        auto& r = ratios[l];
        std::sort(r.begin(), r.end());
        double median = 0.5 * (r[4] + r[5]);
        if (!(median <= 0.9)) {
          note("criterion 8: median W1 ratio " + std::to_string(median) +
               " at l=" + std::to_string(l) + " k=" + std::to_string(k));
          return false;
        }
      }
    }
  }
  return true;
}

bool criterion9() {
  ThresholdConfig cfg;
  cfg.k = 10;
  cfg.seed = 7;
  cfg.workers = g_workers;
  auto res = find_threshold(cfg);
  for (const auto& p : res.probes)
    note("criterion 9 probe: alpha=" + std::to_string(p.alpha) +
         " phi=" + std::to_string(p.phi_mean) + " +- " +
         std::to_string(p.phi_stderr) + (p.decided ? "" : " (undecided)"));
  if (!res.bracket_ok) {
    note("criterion 9: " + res.failure);
    return false;
  }
  if (!(res.alpha_star > cfg.lbd() && res.alpha_star < cfg.ubd())) return false;
  double target = std::pow(2.0, 10) * std::log(2.0) - (1 + std::log(2.0)) / 2;
  note("criterion 9: alpha_star=" + std::to_string(res.alpha_star) +
       " target=" + std::to_string(target));
  return std::abs(res.alpha_star - target) <= 0.2;
}

bool criterion10() {
  Rng rng = Rng::stream(777, {0xc});
  for (int trial = 0; trial < 500; trial++) {
    int k = 3 + static_cast<int>(rng.below(3));
    int dp = static_cast<int>(rng.below(4));
    int dm = static_cast<int>(rng.below(4));
    std::vector<std::vector<double>> etap(dp), etam(dm);
    std::vector<ColorDist4> qhat_p, qhat_m;
    for (auto* rows : {&etap, &etam})
      for (auto& row : *rows) {
        row.resize(k - 1);
        for (auto& e : row) e = rng.unit() * 0.98;
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
    if (dp + dm <= 10 &&
        std::abs(t.z_dot - col_zdot_oracle(qhat_p, qhat_m)) > 1e-12)
      return false;
    std::vector<ColorDist4> qdots;
    for (int j = 0; j < k; j++) {
      double split = rng.unit();
      std::array<double, 3> beta{(1 - etak[j]) * split, etak[j],
                                 (1 - etak[j]) * (1 - split)};
      qdots.push_back(qdot_from_eta(beta));
    }
    if (std::abs(t.z_hat - col_zhat_oracle(qdots)) > 1e-12) return false;
  }
  return true;
}

bool criterion11() {
  // closed form vs 2^k enumeration, 500 cases up to k = 12
  Rng rng = Rng::stream(51, {0xd});
  for (int trial = 0; trial < 500; trial++) {
    int k = 2 + static_cast<int>(rng.below(11));
    std::vector<int8_t> st(k);
    std::vector<double> rh(k);
    for (auto& x : st) x = rng.sign();
    for (auto& x : rh) x = 4.0 * rng.unit() - 2.0;
    double beta = 6.0 * rng.unit();
    auto closed = interp_u(st, rh, beta);
    // enumeration
    InterpU en{0, 0, 0};
    for (int code = 0; code < (1 << k); code++) {
      double w = 1.0;
      bool all_false = true;
      for (int j = 0; j < k; j++) {
        int8_t xj = (code >> j) & 1 ? 1 : -1;
        w *= std::exp(rh[j] * xj) / (2.0 * std::cosh(rh[j]));
        if (st[j] * xj != -1) all_false = false;
      }
      if (all_false) w *= std::exp(-beta);
      if ((code >> (k - 1)) & 1)
        en.u_plus += w;
      else
        en.u_minus += w;
    }
    en.u_total = en.u_plus + en.u_minus;
    if (std::abs(closed.u_plus - en.u_plus) > 1e-12) return false;
    if (std::abs(closed.u_minus - en.u_minus) > 1e-12) return false;
    if (std::abs(closed.u_total - en.u_total) > 1e-12) return false;
  }
  // beta = 0 degenerate value: exactly ln 2
  auto pop = evolve(population_delta_half(4, 8.0, 20000), 10, 9, {g_workers});
  InterpConfig c0;
  c0.k = 4;
  c0.alpha = 8.0;
  c0.beta = 0.0;
  c0.m = 0.4;
  c0.outer = 64;
  c0.inner = 64;
  c0.seed = 2;
  c0.workers = g_workers;
  auto e0 = interp_bound(c0, pop);
  if (std::abs(e0.mean - std::log(2.0)) > 1e-12) return false;
  // nested estimator: two seeds agree within 3 sigma
  InterpConfig c1 = c0;
  c1.beta = 8.0;
  c1.m = 1.0 / std::sqrt(8.0);
  c1.outer = 300;
  c1.inner = 200;
  c1.seed = 21;
  auto ea = interp_bound(c1, pop);
  InterpConfig c2 = c1;
  c2.seed = 22;
  auto eb = interp_bound(c2, pop);
  if (!(std::abs(ea.mean - eb.mean) < 3 * (ea.stderr_ + eb.stderr_)))
    return false;
  note("criterion 11: [SECONDARY NOTE] the beta->infinity limit of Prop 1.3 "
       "is not reproducible at desk scale; tested beta=0 exactness, closed "
       "form vs enumeration, and seed stability as specified");
  return true;
}

bool criterion12() {
  // Lemma-style bound on 1000 random trees
  for (uint64_t seed = 0; seed < 1000; seed++) {
    auto t = sample_pgw_tree(0.7 + 0.1 * (seed % 5), 3, 3.0 + (seed % 2),
                             4000 + seed);
    auto g = t.to_graph();
    Rng rng = Rng::stream(seed, {0x5f});
    std::vector<int> a;
    for (int v = 1; v <= g.n(); v++)
      if (rng.unit() < 0.25) a.push_back(v);
    if (a.empty()) a.push_back(1 + static_cast<int>(rng.below(g.n())));
    auto fb = spanning_forest_bound_check(g, a);
    if (!fb.ok) return false;
  }
  // monotone and idempotent
  for (uint64_t seed = 0; seed < 100; seed++) {
    InstanceParams p;
    p.n = 60;
    p.k = 3;
    p.alpha = 1.2;
    p.seed = 6000 + seed;
    auto g = generate_instance(p);
    Rng rng = Rng::stream(seed, {0x60});
    std::vector<int> a, b;
    for (int v = 1; v <= g.n(); v++) {
      uint64_t r = rng.next();
      if (r & 1) a.push_back(v);
      if (r & 3) b.push_back(v);
    }
    auto ca = bsp(a, g), cb = bsp(b, g);
    if (!std::includes(cb.begin(), cb.end(), ca.begin(), ca.end())) return false;
    if (!(bsp(ca, g) == ca)) return false;
  }
  // BSP' terminates with an empty trigger set on 100 random graphs n = 1000
  for (uint64_t seed = 0; seed < 100; seed++) {
    InstanceParams p;
    p.n = 1000;
    p.k = 3;
    p.alpha = 1.0;
    p.seed = 7000 + seed;
    auto g = generate_instance(p);
    std::vector<int> trigger;
    Rng rng = Rng::stream(seed, {0x61});
    for (int i = 0; i < 15; i++)
      trigger.push_back(1 + static_cast<int>(rng.below(g.n())));
    auto r = bsp_prime(trigger, g, 2.0);
    // verify the survivor graph has no degree-deficiency trigger
    for (int v = 1; v <= g.n(); v++) {
      if (!r.var_alive[v]) continue;
      int d1 = 0;
      bool d2 = false;
      std::set<int> seen;
      for (const auto& occ : g.adj(v)) {
        if (!r.clause_alive[occ.clause] || !seen.insert(occ.clause).second)
          continue;
        int deg = 0;
        for (const Lit& l : g.clause(occ.clause)) deg += r.var_alive[l.var];
        int full = static_cast<int>(g.clause(occ.clause).size());
        if (deg == full - 1) d1++;
        if (deg <= full - 2) d2 = true;
      }
      if (d1 >= 2 || d2) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; i++) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      std::string list = argv[++i];
      size_t pos = 0;
      while (pos < list.size()) {
        size_t comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        only.insert(std::stoi(list.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    } else if (!std::strcmp(argv[i], "--workers") && i + 1 < argc) {
      g_workers = std::stoi(argv[++i]);
    }
  }

  struct Criterion {
    int id;
    const char* desc;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {1, "moment identities on the (k, alpha) grid", criterion1},
      {2, "exact pair moment vs brute force, rational", criterion2},
      {3, "first-moment root alpha_1", criterion3},
      {4, "bijection suite on 500 instances", criterion4},
      {5, "coarsen/cluster suite and the cycle gadget", criterion5},
      {6, "tree BP vs Gibbs on 200 weighted trees", criterion6},
      {7, "eta-message correspondence", criterion7},
      {8, "population dynamics contraction and tails", criterion8},
      {9, "threshold bracket and value at k=10", criterion9},
      {10, "color-model term oracles", criterion10},
      {11, "interpolation bound unit checks", criterion11},
      {12, "bootstrap percolation and forest bound", criterion12},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      note(std::string("criterion ") + std::to_string(c.id) +
           " exception: " + e.what());
    }
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.desc);
    std::fflush(stdout);
    if (!ok) failed++;
  }
  for (const auto& n : g_notes) std::printf("  note: %s\n", n.c_str());
  std::printf("%s\n", failed ? "ACCEPTANCE: FAILED" : "ACCEPTANCE: OK");
  return failed ? 1 : 0;
}
