#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ksat/factor_graph.hpp"
#include "ksat/preprocess.hpp"

using namespace ksat;

TEST_CASE("bootstrap percolation basics") {
  FactorGraph g(3, 3, {{Lit{1, 1}, Lit{2, 1}, Lit{3, 1}}});
  CHECK(bsp({}, g).empty());
  // two infected variables infect the third through the shared clause
  auto closure = bsp({1, 2}, g);
  CHECK(closure == std::vector<int>{1, 2, 3});
  // full set is a fixed point
  CHECK(bsp({1, 2, 3}, g) == std::vector<int>{1, 2, 3});
  // a single variable cannot spread
  CHECK(bsp({2}, g) == std::vector<int>{2});
}

TEST_CASE("bsp is monotone and idempotent") {
  for (uint64_t seed = 0; seed < 20; seed++) {
    InstanceParams p;
    p.n = 40;
    p.k = 3;
    p.alpha = 1.5;
    p.seed = 100 + seed;
    auto g = generate_instance(p);
    Rng rng = Rng::stream(seed, {0xb});
    std::vector<int> a, b;
    for (int v = 1; v <= g.n(); v++) {
      uint64_t r = rng.next();
      if (r & 1) a.push_back(v);
      if (r & 3) b.push_back(v);  // a subset relation: a implies b
    }
    auto ca = bsp(a, g);
    auto cb = bsp(b, g);
    CHECK(std::includes(cb.begin(), cb.end(), ca.begin(), ca.end()));
    CHECK(bsp(ca, g) == ca);
  }
}

TEST_CASE("ball removal terminates with an empty trigger set") {
  // star with one clause: any trigger variable's ball swallows the clause
  FactorGraph star(3, 3, {{Lit{1, 1}, Lit{2, 1}, Lit{3, 1}}});
  auto res = bsp_prime({2}, star, 1.0);
  CHECK(res.rounds == 1);
  CHECK(res.log.size() == 1);
  CHECK(res.log[0].trigger_variable == 2);
  CHECK_FALSE(res.clause_alive[0]);
  CHECK(res.removed == std::vector<int>{1, 2, 3});

  // empty trigger: nothing happens on a clean graph
  auto res0 = bsp_prime({}, star, 1.0);
  CHECK(res0.removed.empty());
  CHECK(res0.rounds == 0);

  // random graphs: always terminates, final trigger set empty
  for (uint64_t seed = 0; seed < 10; seed++) {
    InstanceParams p;
    p.n = 300;
    p.k = 3;
    p.alpha = 1.0;
    p.seed = 500 + seed;
    auto g = generate_instance(p);
    std::vector<int> trigger{1, 5, 9};
    auto r = bsp_prime(trigger, g, 2.0);
    // recompute the degree-deficiency trigger set on the survivor graph
    for (int v = 1; v <= g.n(); v++) {
      if (!r.var_alive[v]) continue;
      int d1 = 0;
      bool d2 = false;
      // 3R/10 = 0.6 ball: just the variable's own clauses, each counted once
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
      bool deficient = d1 >= 2 || d2;
      CHECK_FALSE(deficient);
    }
    // removal log rounds are contiguous from 0
    int max_round = -1;
    for (const auto& row : r.log) max_round = std::max(max_round, row.round);
    CHECK(max_round + 1 == r.rounds);
  }
}

TEST_CASE("spanning forest bound") {
  FactorGraph clause3(3, 3, {{Lit{1, 1}, Lit{2, 1}, Lit{3, 1}}});
  auto fb = spanning_forest_bound_check(clause3, {1});
  CHECK(fb.lhs == 1.0);
  CHECK(fb.rhs == 1.0);
  CHECK(fb.ok);
  auto fb2 = spanning_forest_bound_check(clause3, {1, 2});
  CHECK(fb2.bsp_size == 3);
  CHECK(fb2.rhs == doctest::Approx(1.5));
  CHECK(fb2.ok);
  // vacuous for the empty set
  CHECK(spanning_forest_bound_check(clause3, {}).ok);
  // cyclic input rejected
  FactorGraph cyc(2, 2, {{Lit{1, 1}, Lit{2, 1}}, {Lit{1, -1}, Lit{2, -1}}});
  CHECK_THROWS(spanning_forest_bound_check(cyc, {1}));

  // random trees with random nonempty seeds
  for (uint64_t seed = 0; seed < 200; seed++) {
    auto t = sample_pgw_tree(0.8, 3, 4.0, 900 + seed);
    auto g = t.to_graph();
    Rng rng = Rng::stream(seed, {0xf});
    std::vector<int> a;
    for (int v = 1; v <= g.n(); v++)
      if (rng.unit() < 0.3) a.push_back(v);
    if (a.empty()) a.push_back(1);
    auto r = spanning_forest_bound_check(g, a);
    CHECK(r.ok);
    // weaker form of the same bound (vacuous on clause-free forests)
    if (g.m() > 0)
      CHECK(static_cast<double>(a.size()) >=
            static_cast<double>(r.bsp_size) / (2.0 * g.k()) - 1e-12);
  }
}

TEST_CASE("simple types canonicalize edge-rooted balls") {
  // two isomorphic stars with distinct labels made equal
  FactorGraph g(6, 3,
                {{Lit{1, 1}, Lit{2, 1}, Lit{3, -1}},
                 {Lit{4, 1}, Lit{5, 1}, Lit{6, -1}}});
  std::vector<uint64_t> labels(7, 0);
  for (int v = 1; v <= 6; v++) labels[v] = 100 + (v - 1) % 3;  // same per star
  auto t1 = simple_type(g, 0, 0, 1.0, labels);
  auto t2 = simple_type(g, 1, 0, 1.0, labels);
  CHECK(t1.acyclic);
  CHECK(t1.code == t2.code);
  CHECK(t1.proper);  // within each ball the three labels are distinct

  // flipping one edge sign changes the code
  FactorGraph h(6, 3,
                {{Lit{1, 1}, Lit{2, 1}, Lit{3, 1}},
                 {Lit{4, 1}, Lit{5, 1}, Lit{6, -1}}});
  auto t3 = simple_type(h, 0, 0, 1.0, labels);
  CHECK(t3.code != t1.code);

  // duplicate labels inside one ball
  std::vector<uint64_t> dup(7, 42);
  auto t4 = simple_type(g, 0, 0, 1.0, dup);
  CHECK_FALSE(t4.proper);
  CHECK(t4.acyclic);

  // distinct labels: proper
  auto uniq = uniform_labels(6, 11);
  auto t5 = simple_type(g, 0, 0, 1.0, uniq);
  CHECK(t5.proper);
  CHECK(uniform_labels(6, 11) == uniq);

  // a cycle in the ball: no tree code
  FactorGraph cyc(2, 2, {{Lit{1, 1}, Lit{2, 1}}, {Lit{1, -1}, Lit{2, -1}}});
  auto t6 = simple_type(cyc, 0, 0, 1.5, uniform_labels(2, 3));
  CHECK_FALSE(t6.acyclic);
  CHECK(t6.code.empty());
}

TEST_CASE("position within the clause distinguishes types") {
  FactorGraph g(3, 3, {{Lit{1, 1}, Lit{2, 1}, Lit{3, 1}}});
  auto labels = std::vector<uint64_t>(4, 7);
  auto a = simple_type(g, 0, 0, 1.0, labels);
  auto b = simple_type(g, 0, 1, 1.0, labels);
  CHECK(a.j_root == 0);
  CHECK(b.j_root == 1);
  CHECK(a.code != b.code);
}
