#include "ksat/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ksat/rng.hpp"

namespace ksat {

std::vector<int> bsp(const std::vector<int>& d0, const FactorGraph& g) {
  std::vector<bool> in(g.n() + 1, false);
  for (int v : d0) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("bsp: variable out of range");
    in[v] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 1; v <= g.n(); v++) {
      if (in[v]) continue;
      std::set<int> neighbors_in;
      for (const auto& occ : g.adj(v)) {
        for (const Lit& l : g.clause(occ.clause)) {
          if (l.var != v && in[l.var]) neighbors_in.insert(l.var);
        }
      }
      if (neighbors_in.size() >= 2) {
        in[v] = true;
        changed = true;
      }
    }
  }
  std::vector<int> out;
  for (int v = 1; v <= g.n(); v++)
    if (in[v]) out.push_back(v);
  return out;
}

namespace {

// BFS ball in the alive subgraph; returns (variables, clauses) within the
// half-integer radius.
struct AliveBall {
  std::vector<int> vars;
  std::vector<int> clauses;
};

AliveBall alive_ball(const FactorGraph& g, const std::vector<bool>& var_alive,
                     const std::vector<bool>& clause_alive, int root,
                     int max_half) {
  AliveBall ball;
  std::set<int> seen_v, seen_c;
  std::deque<std::pair<int, int>> q;  // (+var / -(clause+1), dist)
  seen_v.insert(root);
  q.push_back({root, 0});
  while (!q.empty()) {
    auto [x, d] = q.front();
    q.pop_front();
    if (d >= max_half) continue;
    if (x > 0) {
      for (const auto& occ : g.adj(x)) {
        if (!clause_alive[occ.clause] || seen_c.count(occ.clause)) continue;
        seen_c.insert(occ.clause);
        q.push_back({-(occ.clause + 1), d + 1});
      }
    } else {
      int a = -x - 1;
      for (const Lit& l : g.clause(a)) {
        if (!var_alive[l.var] || seen_v.count(l.var)) continue;
        seen_v.insert(l.var);
        q.push_back({l.var, d + 1});
      }
    }
  }
  ball.vars.assign(seen_v.begin(), seen_v.end());
  ball.clauses.assign(seen_c.begin(), seen_c.end());
  return ball;
}

int alive_clause_degree(const FactorGraph& g, const std::vector<bool>& var_alive,
                        int a) {
  int d = 0;
  for (const Lit& l : g.clause(a))
    if (var_alive[l.var]) d++;
  return d;
}

}  // namespace

BspPrimeResult bsp_prime(const std::vector<int>& trigger, const FactorGraph& g,
                         double radius) {
  double r2 = radius * 2.0;
  if (!(radius > 0) || r2 != std::floor(r2))
    throw std::invalid_argument("bsp_prime: radius must be a positive multiple of 1/2");
  const int max_half = static_cast<int>(r2);
  const int probe_half = static_cast<int>(std::floor(2.0 * (3.0 * radius / 10.0)));

  BspPrimeResult res;
  res.var_alive.assign(g.n() + 1, true);
  res.clause_alive.assign(g.m(), true);

  std::vector<int> current = trigger;
  for (int v : current)
    if (v < 1 || v > g.n())
      throw std::invalid_argument("bsp_prime: trigger variable out of range");
  std::sort(current.begin(), current.end());
  current.erase(std::unique(current.begin(), current.end()), current.end());

  int round = 0;
  while (!current.empty()) {
    // snapshot balls, then remove their union
    std::vector<AliveBall> balls;
    for (int v : current) {
      if (!res.var_alive[v]) {
        balls.push_back({});
        continue;
      }
      balls.push_back(alive_ball(g, res.var_alive, res.clause_alive, v, max_half));
    }
    for (size_t i = 0; i < current.size(); i++) {
      res.log.push_back({round, current[i],
                         static_cast<int>(balls[i].vars.size()),
                         static_cast<int>(balls[i].clauses.size())});
    }
    for (const auto& b : balls) {
      for (int v : b.vars) res.var_alive[v] = false;
      for (int c : b.clauses) res.clause_alive[c] = false;
    }
    // a clause with no remaining endpoints but never swept into a ball is
    // kept dead as well
    round++;
    // recompute the degree-deficiency trigger set on the current graph
    current.clear();
    for (int v = 1; v <= g.n(); v++) {
      if (!res.var_alive[v]) continue;
      AliveBall probe =
          alive_ball(g, res.var_alive, res.clause_alive, v, probe_half);
      int deficient1 = 0;
      bool deficient2 = false;
      for (int a : probe.clauses) {
        int deg = alive_clause_degree(g, res.var_alive, a);
        int full = static_cast<int>(g.clause(a).size());
        if (deg == full - 1) deficient1++;
        if (deg <= full - 2) deficient2 = true;
      }
      if (deficient1 >= 2 || deficient2) current.push_back(v);
    }
  }
  res.rounds = round;
  for (int v = 1; v <= g.n(); v++)
    if (!res.var_alive[v]) res.removed.push_back(v);
  // clauses that lost every endpoint are not part of the surviving graph
  for (int a = 0; a < g.m(); a++) {
    if (!res.clause_alive[a]) continue;
    if (alive_clause_degree(g, res.var_alive, a) == 0) res.clause_alive[a] = false;
  }
  return res;
}

std::string bsp_prime_log_csv(const BspPrimeResult& res,
                              const std::string& config_header) {
  std::ostringstream out;
  if (!config_header.empty()) out << "# " << config_header << "\n";
  out << "round,trigger_variable,ball_size,clauses_removed\n";
  for (const auto& row : res.log)
    out << row.round << "," << row.trigger_variable << "," << row.ball_size
        << "," << row.clauses_removed << "\n";
  return out.str();
}

std::vector<uint64_t> uniform_labels(int n, uint64_t seed) {
  std::vector<uint64_t> labels(n + 1, 0);
  Rng rng = Rng::stream(seed, {0x1a});
  for (int v = 1; v <= n; v++) labels[v] = rng.next() | 1;  // avoid 0
  return labels;
}

SimpleType simple_type(const FactorGraph& g, int clause, int slot, double radius,
                       const std::vector<uint64_t>& labels) {
  if (clause < 0 || clause >= g.m())
    throw std::invalid_argument("simple_type: clause out of range");
  const auto& cl = g.clause(clause);
  if (slot < 0 || slot >= static_cast<int>(cl.size()))
    throw std::invalid_argument("simple_type: slot out of range");
  int v = cl[slot].var;
  if (static_cast<int>(labels.size()) != g.n() + 1)
    throw std::invalid_argument("simple_type: labels must have n+1 entries");

  Ball ball = neighborhood(g, v, radius);
  SimpleType st;
  st.j_root = slot;
  st.acyclic = !ball.cyclic;
  if (!st.acyclic) return st;

  std::set<uint64_t> seen_labels;
  st.proper = true;
  for (size_t i = 1; i < ball.var_of.size(); i++) {
    uint64_t l = labels[ball.var_of[i]];
    if (!seen_labels.insert(l).second) st.proper = false;
  }

  // recursive canonical encoding over the ball (original ids via ball maps)
  const FactorGraph& bg = ball.graph;
  std::function<std::string(int, int)> enc_var = [&](int bv, int from_clause) {
    std::string code = "v" + std::to_string(labels[ball.var_of[bv]]) + "(";
    std::vector<std::string> parts;
    for (const auto& occ : bg.adj(bv)) {
      if (occ.clause == from_clause) continue;
      parts.push_back([&](int bc, int entry_slot) {
        const auto& bcl = bg.clause(bc);
        std::string c = "c[j" + std::to_string(entry_slot) + (bcl[entry_slot].sign > 0 ? "+" : "-") + "](";
        for (int j = 0; j < static_cast<int>(bcl.size()); j++) {
          if (j == entry_slot) continue;
          c += "j" + std::to_string(j) + (bcl[j].sign > 0 ? "+" : "-") +
               enc_var(bcl[j].var, bc);
        }
        return c + ")";
      }(occ.clause, occ.slot));
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& p : parts) code += p;
    return code + ")";
  };

  // rooted at edge (clause, slot): mark the root edge's clause, encode the
  // remaining neighborhood of v as a sorted multiset
  const auto& adj = bg.adj(ball.root);
  std::string root_clause_code;
  {
    // locate the ball copy of (clause, slot)
    int found = -1, found_slot = -1;
    for (const auto& occ : adj) {
      if (ball.clause_of[occ.clause] == clause && occ.slot == slot) {
        found = occ.clause;
        found_slot = occ.slot;
        break;
      }
    }
    if (found < 0)
      throw std::invalid_argument("simple_type: rooted edge not inside ball");
    const auto& bcl = bg.clause(found);
    root_clause_code = "*c[j" + std::to_string(found_slot) +
                       (bcl[found_slot].sign > 0 ? "+" : "-") + "](";
    for (int j = 0; j < static_cast<int>(bcl.size()); j++) {
      if (j == found_slot) continue;
      root_clause_code += "j" + std::to_string(j) + (bcl[j].sign > 0 ? "+" : "-") +
                          enc_var(bcl[j].var, found);
    }
    root_clause_code += ")";
  }
  std::vector<std::string> rest;
  for (const auto& occ : adj) {
    if (ball.clause_of[occ.clause] == clause && occ.slot == slot) continue;
    const auto& bcl = bg.clause(occ.clause);
    std::string c = "c[j" + std::to_string(occ.slot) +
                    (bcl[occ.slot].sign > 0 ? "+" : "-") + "](";
    for (int j = 0; j < static_cast<int>(bcl.size()); j++) {
      if (j == occ.slot) continue;
      c += "j" + std::to_string(j) + (bcl[j].sign > 0 ? "+" : "-") +
           enc_var(bcl[j].var, occ.clause);
    }
    rest.push_back(c + ")");
  }
  std::sort(rest.begin(), rest.end());
  st.code = "R" + std::to_string(labels[ball.var_of[ball.root]]) + "|" +
            root_clause_code;
  for (const auto& p : rest) st.code += p;
  return st;
}

ForestBound spanning_forest_bound_check(const FactorGraph& tree,
                                        const std::vector<int>& a) {
  // cycle check: in each connected component, edges must equal vertices - 1
  {
    std::vector<int> color(tree.n() + 1, -1);
    int comps = 0;
    int64_t edges = 0;
    for (int c = 0; c < tree.m(); c++) edges += tree.clause(c).size();
    std::vector<bool> clause_seen(tree.m(), false);
    int64_t vertices = tree.n() + tree.m();
    // count components over the bipartite graph
    for (int start = 1; start <= tree.n(); start++) {
      if (color[start] >= 0) continue;
      comps++;
      std::deque<int> q{start};
      color[start] = comps;
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (const auto& occ : tree.adj(x)) {
          if (clause_seen[occ.clause]) continue;
          clause_seen[occ.clause] = true;
          for (const Lit& l : tree.clause(occ.clause)) {
            if (color[l.var] < 0) {
              color[l.var] = comps;
              q.push_back(l.var);
            }
          }
        }
      }
    }
    int isolated_clauses = 0;
    for (int c = 0; c < tree.m(); c++)
      if (tree.clause(c).empty()) isolated_clauses++;
    if (edges != vertices - comps - isolated_clauses)
      throw std::invalid_argument("spanning_forest_bound_check: input not a forest");
  }
  ForestBound fb;
  fb.lhs = static_cast<double>(a.size());
  if (a.empty()) return fb;  // vacuous
  auto closure = bsp(a, tree);
  fb.bsp_size = static_cast<int64_t>(closure.size());
  int k_eff = std::max(2, tree.k());  // clause-free forests carry k = 0
  fb.rhs = 1.0 + (static_cast<double>(fb.bsp_size) - 1.0) /
                     (2.0 * (k_eff - 1));
  fb.ok = fb.lhs >= fb.rhs - 1e-12;
  return fb;
}

}  // namespace ksat
