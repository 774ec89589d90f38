#include "ksat/cluster_models.hpp"

#include "ksat/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ksat {

namespace {

std::vector<int> clause_offsets(const FactorGraph& g) {
  std::vector<int> off(g.m() + 1, 0);
  for (int a = 0; a < g.m(); a++)
    off[a + 1] = off[a] + static_cast<int>(g.clause(a).size());
  return off;
}

inline Spin lit_eval(int8_t sign, Spin x) {
  return static_cast<Spin>(sign * x);  // f (0) absorbs
}

}  // namespace

uint32_t mask_of(const std::vector<Spin>& x) {
  uint32_t m = 0;
  for (size_t v = 1; v < x.size(); v++)
    if (x[v] > 0) m |= (uint32_t(1) << (v - 1));
  return m;
}

std::vector<uint32_t> enumerate_solutions(const FactorGraph& g) {
  if (g.n() > 26) throw BudgetExceeded("budget: enumerate_solutions n > 26");
  std::vector<uint32_t> pos_mask(g.m(), 0), neg_mask(g.m(), 0);
  for (int a = 0; a < g.m(); a++) {
    for (const Lit& l : g.clause(a)) {
      uint32_t bit = uint32_t(1) << (l.var - 1);
      if (l.sign > 0)
        pos_mask[a] |= bit;
      else
        neg_mask[a] |= bit;
    }
  }
  std::vector<uint32_t> sols;
  const uint32_t top = g.n() >= 32 ? 0xffffffffu : (uint32_t(1) << g.n()) - 1;
  for (uint64_t x = 0; x <= top; x++) {
    uint32_t xm = static_cast<uint32_t>(x);
    bool ok = true;
    for (int a = 0; a < g.m(); a++) {
      // satisfied iff some positive literal true or negative literal false
      if ((pos_mask[a] & xm) == 0 && (neg_mask[a] & ~xm) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) sols.push_back(xm);
  }
  return sols;
}

ClusterPartition clusters(const std::vector<uint32_t>& solutions, int n) {
  std::vector<uint32_t> sorted = solutions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> parent(sorted.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (size_t i = 0; i < sorted.size(); i++) {
    for (int b = 0; b < n; b++) {
      uint32_t nb = sorted[i] ^ (uint32_t(1) << b);
      auto it = std::lower_bound(sorted.begin(), sorted.end(), nb);
      if (it != sorted.end() && *it == nb) {
        int j = static_cast<int>(it - sorted.begin());
        int ri = find(static_cast<int>(i)), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  ClusterPartition part;
  std::vector<int> block_of(sorted.size(), -1);
  for (size_t i = 0; i < sorted.size(); i++) {
    int r = find(static_cast<int>(i));
    if (block_of[r] < 0) {
      block_of[r] = static_cast<int>(part.blocks.size());
      part.blocks.push_back({});
    }
    part.blocks[block_of[r]].push_back(sorted[i]);
  }
  return part;
}

std::vector<Spin> co_step(const std::vector<Spin>& x, const FactorGraph& g) {
  // violated clause: all literals strictly false
  for (int a = 0; a < g.m(); a++) {
    bool violated = true;
    for (const Lit& l : g.clause(a))
      if (lit_eval(l.sign, x[l.var]) != -1) {
        violated = false;
        break;
      }
    if (violated)
      throw std::invalid_argument("co_step: clause " + std::to_string(a) +
                                  " violated");
  }
  std::vector<Spin> y(x.size(), kSpinF);
  for (int v = 1; v <= g.n(); v++) {
    bool blocked = false;
    for (const auto& occ : g.adj(v)) {
      const auto& cl = g.clause(occ.clause);
      bool all_neg = true;
      for (int j = 0; j < static_cast<int>(cl.size()); j++) {
        if (j == occ.slot) continue;
        if (lit_eval(cl[j].sign, x[cl[j].var]) != -1) {
          all_neg = false;
          break;
        }
      }
      if (all_neg) {
        blocked = true;
        break;
      }
    }
    if (blocked) y[v] = x[v];
  }
  return y;
}

FrozenConfig coarsen(const std::vector<Spin>& x, const FactorGraph& g) {
  std::vector<Spin> cur = x;
  for (;;) {
    std::vector<Spin> next = co_step(cur, g);
    if (next == cur) break;
    cur = std::move(next);
  }
  FrozenConfig out(g.n());
  out.value = cur;
  return out;
}

FrozenConfig coarsen_mask(uint32_t solution, const FactorGraph& g) {
  std::vector<Spin> x(g.n() + 1, kSpinF);
  for (int v = 1; v <= g.n(); v++)
    x[v] = (solution >> (v - 1)) & 1 ? 1 : -1;
  return coarsen(x, g);
}

FrozenConfig cube(const std::vector<uint32_t>& cluster, int n) {
  if (cluster.empty()) throw std::invalid_argument("cube: empty cluster");
  uint32_t all_and = ~uint32_t(0), all_or = 0;
  for (uint32_t s : cluster) {
    all_and &= s;
    all_or |= s;
  }
  FrozenConfig out(n);
  for (int v = 1; v <= n; v++) {
    uint32_t bit = uint32_t(1) << (v - 1);
    if (all_and & bit)
      out.value[v] = 1;
    else if (!(all_or & bit))
      out.value[v] = -1;
    else
      out.value[v] = kSpinF;
  }
  return out;
}

ValidityWitness is_valid_frozen(const FrozenConfig& x, const FactorGraph& g) {
  for (int a = 0; a < g.m(); a++) {
    bool satisfied = false;
    for (const Lit& l : g.clause(a))
      if (lit_eval(l.sign, x.value[l.var]) != -1) {
        satisfied = true;
        break;
      }
    if (!satisfied)
      return {false, "clause " + std::to_string(a) + " violated"};
  }
  for (int v = 1; v <= g.n(); v++) {
    bool forced = false;
    for (const auto& occ : g.adj(v)) {
      const auto& cl = g.clause(occ.clause);
      bool all_neg = true;
      for (int j = 0; j < static_cast<int>(cl.size()); j++) {
        if (j == occ.slot) continue;
        if (lit_eval(cl[j].sign, x.value[cl[j].var]) != -1) {
          all_neg = false;
          break;
        }
      }
      if (all_neg) {
        forced = true;
        break;
      }
    }
    if (forced && x.value[v] == kSpinF)
      return {false, "variable " + std::to_string(v) + " forced but f"};
    if (!forced && x.value[v] != kSpinF)
      return {false, "variable " + std::to_string(v) + " rigid but not forced"};
  }
  return {};
}

std::vector<FrozenConfig> enumerate_frozen(const FactorGraph& g) {
  if (g.n() > 14) throw BudgetExceeded("budget: enumerate_frozen n > 14");
  std::vector<FrozenConfig> out;
  int64_t total = 1;
  for (int i = 0; i < g.n(); i++) total *= 3;
  for (int64_t code = 0; code < total; code++) {
    FrozenConfig x(g.n());
    int64_t c = code;
    for (int v = 1; v <= g.n(); v++) {
      int t = static_cast<int>(c % 3);
      c /= 3;
      x.value[v] = t == 0 ? kSpinF : (t == 1 ? Spin(1) : Spin(-1));
    }
    if (is_valid_frozen(x, g).valid) out.push_back(std::move(x));
  }
  return out;
}

Spin ev_of(uint8_t color, int8_t sign) {
  switch (color) {
    case kR:
    case kB:
      return sign;
    case kY:
      return static_cast<Spin>(-sign);
    default:
      return kSpinF;
  }
}

bool clause_factor(const std::vector<uint8_t>& colors) {
  int nr = 0, ny = 0, nc = 0;
  for (uint8_t c : colors) {
    if (c == kR) nr++;
    else if (c == kY) ny++;
    else nc++;  // g or b: cyan
  }
  if (nr == 1 && ny == static_cast<int>(colors.size()) - 1) return true;
  if (nr == 0 && nc >= 2) return true;
  return false;
}

EvResult variable_factor(const std::vector<uint8_t>& colors,
                         const std::vector<int8_t>& signs) {
  bool all_g = true;
  for (uint8_t c : colors)
    if (c != kG) all_g = false;
  if (all_g) return {true, kSpinF};
  for (Spin x : {Spin(1), Spin(-1)}) {
    // supporting edges (L = x): all purple {r,b} with at least one r;
    // opposing edges (L = -x): all yellow
    bool ok = true, has_r = false;
    for (size_t i = 0; i < colors.size(); i++) {
      if (signs[i] == x) {
        if (colors[i] == kR)
          has_r = true;
        else if (colors[i] != kB)
          ok = false;
      } else {
        if (colors[i] != kY) ok = false;
      }
      if (!ok) break;
    }
    if (ok && has_r) return {true, x};
  }
  return {false, kSpinF};
}

WarningConfig frozen_to_wp(const FrozenConfig& x, const FactorGraph& g) {
  auto witness = is_valid_frozen(x, g);
  if (!witness.valid)
    throw std::invalid_argument("frozen_to_wp: invalid input: " + witness.reason);
  auto off = clause_offsets(g);
  WarningConfig w;
  w.to_clause.assign(off.back(), kSpinF);
  w.to_var.assign(off.back(), kSpinF);
  // clause-to-variable warnings are functions of the frozen spins
  for (int a = 0; a < g.m(); a++) {
    const auto& cl = g.clause(a);
    for (int j = 0; j < static_cast<int>(cl.size()); j++) {
      bool all_neg = true;
      for (int j2 = 0; j2 < static_cast<int>(cl.size()); j2++) {
        if (j2 == j) continue;
        if (lit_eval(cl[j2].sign, x.value[cl[j2].var]) != -1) {
          all_neg = false;
          break;
        }
      }
      w.to_var[off[a] + j] = all_neg ? 1 : kSpinF;
    }
  }
  // variable-to-clause warnings apply the WP rule to the incoming warnings
  for (int v = 1; v <= g.n(); v++) {
    for (const auto& occ : g.adj(v)) {
      int8_t sign_va = g.clause(occ.clause)[occ.slot].sign;
      bool plus = false, minus = false;  // warnings for L_av x_v
      for (const auto& other : g.adj(v)) {
        if (other.clause == occ.clause && other.slot == occ.slot) continue;
        if (w.to_var[off[other.clause] + other.slot] != 1) continue;
        int8_t sign_other = g.clause(other.clause)[other.slot].sign;
        if (sign_other == sign_va)
          plus = true;
        else
          minus = true;
      }
      if (plus && minus)
        throw std::runtime_error("frozen_to_wp: conflicting warnings");
      Spin m = plus ? 1 : (minus ? Spin(-1) : kSpinF);
      if (m == -1 && w.to_var[off[occ.clause] + occ.slot] == 1)
        throw std::runtime_error("frozen_to_wp: forbidden -+ pair");
      w.to_clause[off[occ.clause] + occ.slot] = m;
    }
  }
  return w;
}

FrozenConfig wp_to_frozen(const WarningConfig& w, const FactorGraph& g) {
  auto off = clause_offsets(g);
  FrozenConfig x(g.n());
  for (int v = 1; v <= g.n(); v++) {
    Spin val = kSpinF;
    bool conflict = false;
    for (const auto& occ : g.adj(v)) {
      int e = off[occ.clause] + occ.slot;
      int8_t sign = g.clause(occ.clause)[occ.slot].sign;
      Spin demand = kSpinF;
      if (w.to_var[e] == 1 || w.to_clause[e] == 1)
        demand = sign;  // L_av x_v = +
      else if (w.to_clause[e] == -1)
        demand = static_cast<Spin>(-sign);
      if (demand != kSpinF) {
        if (val != kSpinF && val != demand) conflict = true;
        val = demand;
      }
    }
    if (conflict)
      throw std::invalid_argument("wp_to_frozen: inconsistent warnings at variable " +
                                  std::to_string(v));
    x.value[v] = val;
  }
  auto witness = is_valid_frozen(x, g);
  if (!witness.valid)
    throw std::invalid_argument("wp_to_frozen: invalid warning configuration: " +
                                witness.reason);
  return x;
}

Coloring wp_to_coloring(const WarningConfig& w, const FactorGraph& g) {
  Coloring c;
  c.color.resize(w.to_clause.size());
  for (size_t e = 0; e < w.to_clause.size(); e++) {
    Spin mdot = w.to_clause[e], mhat = w.to_var[e];
    if (mhat == 1) {
      if (mdot == -1)
        throw std::invalid_argument("wp_to_coloring: forbidden -+ pair");
      c.color[e] = kR;  // ++ and f+ both project to r
    } else {
      c.color[e] = mdot == 1 ? kB : (mdot == -1 ? kY : kG);
    }
  }
  return c;
}

FrozenConfig coloring_to_frozen(const Coloring& c, const FactorGraph& g) {
  auto off = clause_offsets(g);
  FrozenConfig x(g.n());
  for (int v = 1; v <= g.n(); v++) {
    std::vector<uint8_t> colors;
    std::vector<int8_t> signs;
    for (const auto& occ : g.adj(v)) {
      colors.push_back(c.color[off[occ.clause] + occ.slot]);
      signs.push_back(g.clause(occ.clause)[occ.slot].sign);
    }
    EvResult ev = variable_factor(colors, signs);
    if (!ev.valid)
      throw std::invalid_argument("coloring_to_frozen: invalid at variable " +
                                  std::to_string(v));
    x.value[v] = ev.ev;
  }
  return x;
}

WarningConfig coloring_to_wp(const Coloring& c, const FactorGraph& g) {
  return frozen_to_wp(coloring_to_frozen(c, g), g);
}

Coloring frozen_to_coloring(const FrozenConfig& x, const FactorGraph& g) {
  return wp_to_coloring(frozen_to_wp(x, g), g);
}

namespace {

// Backtracking enumerator over per-edge states with local-factor pruning.
// Edges are visited clause-major. The `clause_check` runs on complete
// clauses and on prefixes; `var_check` runs on a variable's full incident
// color/state list once complete, and partial lists otherwise.
struct EdgeRef {
  int clause, slot, var;
  int8_t sign;
};

std::vector<EdgeRef> edge_list(const FactorGraph& g) {
  std::vector<EdgeRef> edges;
  for (int a = 0; a < g.m(); a++)
    for (int j = 0; j < static_cast<int>(g.clause(a).size()); j++)
      edges.push_back({a, j, g.clause(a)[j].var, g.clause(a)[j].sign});
  return edges;
}

}  // namespace

std::vector<Coloring> enumerate_colorings(const FactorGraph& g) {
  auto edges = edge_list(g);
  auto off = clause_offsets(g);
  const int E = static_cast<int>(edges.size());
  std::vector<uint8_t> cur(E, 0);
  std::vector<Coloring> out;

  std::vector<std::vector<int>> var_edges(g.n() + 1);
  for (int e = 0; e < E; e++) var_edges[edges[e].var].push_back(e);

  // clause prefix feasibility
  auto clause_feasible = [&](int a, int assigned_upto) {
    int deg = off[a + 1] - off[a];
    int done = std::min(assigned_upto - off[a], deg);
    if (done <= 0) return true;
    int nr = 0, ny = 0, nc = 0;
    for (int j = 0; j < done; j++) {
      uint8_t col = cur[off[a] + j];
      if (col == kR) nr++;
      else if (col == kY) ny++;
      else nc++;
    }
    int rest = deg - done;
    bool forcing_ok = (nc == 0 && nr <= 1 && nr + rest >= 1);
    bool nonforcing_ok = (nr == 0 && nc + rest >= 2);
    if (done == deg) {
      forcing_ok = (nc == 0 && nr == 1);
      nonforcing_ok = (nr == 0 && nc >= 2);
    }
    return forcing_ok || nonforcing_ok;
  };

  // variable feasibility over its assigned edges
  auto var_feasible = [&](int v, int assigned_upto) {
    std::vector<uint8_t> colors;
    std::vector<int8_t> signs;
    bool complete = true;
    for (int e : var_edges[v]) {
      if (e < assigned_upto) {
        colors.push_back(cur[e]);
        signs.push_back(edges[e].sign);
      } else {
        complete = false;
      }
    }
    if (colors.empty()) return true;
    if (complete) return variable_factor(colors, signs).valid;
    // partial: f possible iff all g so far; rigid x possible iff assigned
    // supporters are purple and assigned opposers are yellow
    bool f_ok = true;
    for (uint8_t c : colors)
      if (c != kG) f_ok = false;
    if (f_ok) return true;
    for (Spin x : {Spin(1), Spin(-1)}) {
      bool ok = true;
      for (size_t i = 0; i < colors.size(); i++) {
        if (signs[i] == x) {
          if (colors[i] != kR && colors[i] != kB) ok = false;
        } else if (colors[i] != kY) {
          ok = false;
        }
      }
      if (ok) return true;
    }
    return false;
  };

  std::function<void(int)> rec = [&](int e) {
    if (e == E) {
      Coloring c;
      c.color = cur;
      out.push_back(std::move(c));
      return;
    }
    for (uint8_t col : {kR, kY, kG, kB}) {
      cur[e] = col;
      if (!clause_feasible(edges[e].clause, e + 1)) continue;
      if (!var_feasible(edges[e].var, e + 1)) continue;
      rec(e + 1);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(),
            [](const Coloring& a, const Coloring& b) { return a.color < b.color; });
  return out;
}

std::vector<WarningConfig> enumerate_warnings(const FactorGraph& g) {
  auto edges = edge_list(g);
  auto off = clause_offsets(g);
  const int E = static_cast<int>(edges.size());

  // A valid configuration carries at most one clause-to-variable warning
  // per clause (a second one would create a forbidden -+ pair), so the
  // search enumerates, clause by clause, the choice of forcing slot (or
  // none). Variable-to-clause warnings are determined once every clause at
  // a variable has chosen: incoming + warnings must agree in sign, and an
  // edge is rigid iff some other edge of the variable carries +. A clause
  // is validated as soon as all its variables are closed.
  std::vector<int> clause_order;
  {
    std::vector<bool> placed(g.m(), false);
    std::vector<bool> seen_var(g.n() + 1, false);
    for (int step = 0; step < g.m(); step++) {
      int best = -1, best_score = -1;
      for (int a = 0; a < g.m(); a++) {
        if (placed[a]) continue;
        int score = 0;
        for (const Lit& l : g.clause(a)) score += seen_var[l.var];
        if (score > best_score) {
          best = a;
          best_score = score;
        }
      }
      placed[best] = true;
      clause_order.push_back(best);
      for (const Lit& l : g.clause(best)) seen_var[l.var] = true;
    }
  }

  std::vector<std::vector<int>> var_edges(g.n() + 1);
  for (int e = 0; e < E; e++) var_edges[edges[e].var].push_back(e);

  std::vector<int8_t> mhat(E, 0);  // 1 = +, 0 = f
  std::vector<int8_t> mdot(E, 0);  // meaningful once the variable is closed
  std::vector<int8_t> rigid(g.n() + 1, 0);
  std::vector<int> remaining(g.n() + 1, 0);  // unprocessed occurrences
  std::vector<int> plus_in(g.n() + 1, 0);    // incoming + warnings
  std::vector<int> closed_cnt(g.m(), 0);     // closed edges per clause
  std::vector<int> nonneg_closed(g.m(), 0);  // closed edges with mdot != -
  std::vector<int> plus_slot(g.m(), -1);
  for (int v = 1; v <= g.n(); v++)
    remaining[v] = static_cast<int>(g.adj(v).size());

  std::vector<WarningConfig> out;

  // closes variable v: derive its outgoing warnings, update the closure
  // bookkeeping of incident clauses, validate fully-closed clauses
  auto close_variable = [&](int v, std::vector<int>& touched_edges) -> bool {
    for (int e : var_edges[v]) {
      int others_plus = plus_in[v] - (mhat[e] == 1 ? 1 : 0);
      Spin w = 0;
      if (others_plus > 0) w = edges[e].sign == rigid[v] ? Spin(1) : Spin(-1);
      mdot[e] = w;
      touched_edges.push_back(e);
      int a = edges[e].clause;
      closed_cnt[a]++;
      if (w != -1) {
        nonneg_closed[a]++;
        if (plus_slot[a] >= 0 && plus_slot[a] != e - off[a]) return false;
      }
      if (closed_cnt[a] == off[a + 1] - off[a]) {
        for (int j = off[a]; j < off[a + 1]; j++) {
          int others_nonneg = nonneg_closed[a] - (mdot[j] != -1 ? 1 : 0);
          if (mhat[j] == 1 && others_nonneg != 0) return false;
          if (mhat[j] == 0 && others_nonneg == 0) return false;
        }
      }
    }
    return true;
  };

  std::function<void(int)> rec = [&](int step) {
    if (step == static_cast<int>(clause_order.size())) {
      WarningConfig w;
      w.to_clause.resize(E);
      w.to_var.resize(E);
      for (int i = 0; i < E; i++) {
        w.to_clause[i] = mdot[i];
        w.to_var[i] = mhat[i];
      }
      out.push_back(std::move(w));
      return;
    }
    int a = clause_order[step];
    int deg = off[a + 1] - off[a];
    for (int choice = -1; choice < deg; choice++) {
      bool ok = true;
      bool rigid_was_set = false;
      bool plus_was_counted = false;
      std::vector<int> touched_edges;
      plus_slot[a] = choice;
      int plus_var = -1;
      if (choice >= 0) {
        int e = off[a] + choice;
        mhat[e] = 1;
        plus_var = edges[e].var;
        if (rigid[plus_var] == 0) {
          rigid[plus_var] = edges[e].sign;
          rigid_was_set = true;
        } else if (rigid[plus_var] != edges[e].sign) {
          ok = false;
        }
        if (ok) {
          plus_in[plus_var]++;
          plus_was_counted = true;
        }
      }
      if (ok) {
        std::vector<int> closed_vars;
        for (int j = off[a]; j < off[a + 1]; j++) {
          int v = edges[j].var;
          if (--remaining[v] == 0) closed_vars.push_back(v);
        }
        for (int v : closed_vars) {
          if (!close_variable(v, touched_edges)) {
            ok = false;
            break;
          }
        }
        if (ok) rec(step + 1);
        for (int j = off[a]; j < off[a + 1]; j++) remaining[edges[j].var]++;
      }
      for (auto it = touched_edges.rbegin(); it != touched_edges.rend(); ++it) {
        int e = *it;
        int b = edges[e].clause;
        closed_cnt[b]--;
        if (mdot[e] != -1) nonneg_closed[b]--;
        mdot[e] = 0;
      }
      if (choice >= 0) {
        mhat[off[a] + choice] = 0;
        if (plus_was_counted) plus_in[plus_var]--;
        if (rigid_was_set) rigid[plus_var] = 0;
      }
      plus_slot[a] = -1;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const WarningConfig& a, const WarningConfig& b) {
    return std::tie(a.to_clause, a.to_var) < std::tie(b.to_clause, b.to_var);
  });
  return out;
}

FactorGraph pinning_gadget(int k) {
  if (k < 2) throw std::invalid_argument("pinning_gadget: k >= 2");
  int n = k;  // z plus k-1 auxiliaries
  std::vector<std::vector<Lit>> cls;
  for (int pattern = 0; pattern < (1 << (k - 1)); pattern++) {
    std::vector<Lit> c;
    c.push_back(Lit{1, -1});  // -z
    for (int i = 0; i < k - 1; i++)
      c.push_back(Lit{2 + i, (pattern >> i) & 1 ? int8_t(-1) : int8_t(1)});
    cls.push_back(std::move(c));
  }
  return FactorGraph(n, k, std::move(cls));
}

CycleGadget cycle_gadget(int k) {
  if (k < 3) throw std::invalid_argument("cycle_gadget: k >= 3");
  // u=1, v=2, w=3; then 3(k-2) pinned variables z_i, each with k-1
  // auxiliaries and 2^(k-1) pinning clauses.
  int next_var = 4;
  std::vector<std::vector<Lit>> cls;
  std::vector<int> zs;
  for (int i = 0; i < 3 * (k - 2); i++) {
    int z = next_var++;
    zs.push_back(z);
    std::vector<int> aux;
    for (int j = 0; j < k - 1; j++) aux.push_back(next_var++);
    for (int pattern = 0; pattern < (1 << (k - 1)); pattern++) {
      std::vector<Lit> c;
      c.push_back(Lit{z, -1});
      for (int j = 0; j < k - 1; j++)
        c.push_back(Lit{aux[j], (pattern >> j) & 1 ? int8_t(-1) : int8_t(1)});
      cls.push_back(std::move(c));
    }
  }
  // cycle clauses a: (u,v), b: (v-,w), c: (w-,u); z literals all positive
  auto make_cycle_clause = [&](int x, int8_t sx, int y, int8_t sy, int zbase) {
    std::vector<Lit> c;
    c.push_back(Lit{x, sx});
    c.push_back(Lit{y, sy});
    for (int i = 0; i < k - 2; i++) c.push_back(Lit{zs[zbase + i], 1});
    return c;
  };
  cls.push_back(make_cycle_clause(1, 1, 2, 1, 0));            // a: u + v
  cls.push_back(make_cycle_clause(2, -1, 3, 1, k - 2));       // b: -v + w
  cls.push_back(make_cycle_clause(3, -1, 1, 1, 2 * (k - 2))); // c: -w + u
  return {FactorGraph(next_var - 1, k, std::move(cls)), 1, 2, 3};
}

CensusRow census(const std::string& id, const FactorGraph& g) {
  CensusRow r;
  r.instance_id = id;
  r.n = g.n();
  r.m = g.m();
  r.k = g.k();
  auto sols = enumerate_solutions(g);
  r.solutions = static_cast<int64_t>(sols.size());
  r.clusters = static_cast<int64_t>(clusters(sols, g.n()).blocks.size());
  r.frozen = static_cast<int64_t>(enumerate_frozen(g).size());
  r.warnings = static_cast<int64_t>(enumerate_warnings(g).size());
  r.colorings = static_cast<int64_t>(enumerate_colorings(g).size());
  return r;
}

std::string census_csv_header() {
  return "instance_id,n,m,k,solutions,clusters,frozen,warnings,colorings";
}

std::string census_csv_row(const CensusRow& r) {
  std::ostringstream out;
  out << r.instance_id << "," << r.n << "," << r.m << "," << r.k << ","
      << r.solutions << "," << r.clusters << "," << r.frozen << ","
      << r.warnings << "," << r.colorings;
  return out.str();
}

}  // namespace ksat
