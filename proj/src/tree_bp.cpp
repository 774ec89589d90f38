#include "ksat/tree_bp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ksat/errors.hpp"
#include <sstream>
#include <stdexcept>

namespace ksat {

std::vector<int> tree_edge_offsets(const FactorTree& t) {
  std::vector<int> off(t.clause_count() + 1, 0);
  for (int c = 0; c < t.clause_count(); c++)
    off[c + 1] = off[c] + 1 + static_cast<int>(t.clauses[c].children.size());
  return off;
}

int tree_edge_count(const FactorTree& t) { return tree_edge_offsets(t).back(); }

namespace {

// per-variable bookkeeping: parent edge id, its sign, and the depth levels.
// var_levels[L] holds variables at depth L; clause_levels[L] holds clauses
// whose parent variable is at depth L.
struct TreeIndex {
  std::vector<int> offsets;
  std::vector<int> var_parent_edge;   // -1 for root
  std::vector<int8_t> var_parent_sign;
  std::vector<std::vector<int>> var_levels;
  std::vector<std::vector<int>> clause_levels;
};

TreeIndex build_index(const FactorTree& t) {
  TreeIndex ix;
  ix.offsets = tree_edge_offsets(t);
  ix.var_parent_edge.assign(t.var_count(), -1);
  ix.var_parent_sign.assign(t.var_count(), t.root_edge_sign);
  for (int c = 0; c < t.clause_count(); c++) {
    for (size_t i = 0; i < t.clauses[c].children.size(); i++) {
      int u = t.clauses[c].children[i];
      ix.var_parent_edge[u] = ix.offsets[c] + 1 + static_cast<int>(i);
      ix.var_parent_sign[u] = t.clauses[c].child_signs[i];
    }
  }
  int seen_vars = 0, seen_clauses = 0;
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    ix.var_levels.push_back(frontier);
    seen_vars += static_cast<int>(frontier.size());
    std::vector<int> next_clauses, next_vars;
    for (int v : frontier)
      for (int b : t.vars[v].children) next_clauses.push_back(b);
    seen_clauses += static_cast<int>(next_clauses.size());
    for (int b : next_clauses)
      for (int u : t.clauses[b].children) next_vars.push_back(u);
    ix.clause_levels.push_back(std::move(next_clauses));
    frontier = std::move(next_vars);
  }
  if (seen_vars != t.var_count() || seen_clauses != t.clause_count())
    throw std::invalid_argument("tree traversal: disconnected structure");
  return ix;
}

template <class T>
std::array<T, 3> measure_from_pi(const T& pi_plus, const T& pi_minus) {
  T wp = (T(1) - pi_plus) * pi_minus;
  T wm = (T(1) - pi_minus) * pi_plus;
  T wf = pi_plus * pi_minus;
  T z = wp + wm + wf;
  return {wp / z, wm / z, wf / z};
}

}  // namespace

template <class T>
std::array<T, 3> eta_recursion_measure(const std::vector<EtaChild<T>>& children) {
  T pi_plus(1), pi_minus(1);
  for (const auto& ch : children) {
    T u(1);
    for (const T& e : ch.etas) u = u * e;
    if (ch.same_sign)
      pi_plus = pi_plus * (T(1) - u);
    else
      pi_minus = pi_minus * (T(1) - u);
  }
  return measure_from_pi(pi_plus, pi_minus);
}

template <class T>
T eta_recursion(const std::vector<EtaChild<T>>& children) {
  return eta_recursion_measure(children)[1];
}

template <class T>
EtaSetT<T> solve_tree_etas(const FactorTree& t) {
  TreeIndex ix = build_index(t);
  const int E = ix.offsets.back();
  EtaSetT<T> s;
  s.beta_var.assign(E, {T(0), T(0), T(1)});
  s.uhat_cls.assign(E, T(0));
  const T half = T(1) / T(2);

  auto var_measure_toward = [&](int v, int excluded_clause,
                                int8_t edge_sign) -> std::array<T, 3> {
    if (t.vars[v].boundary) return {half, half, T(0)};
    T pi_plus(1), pi_minus(1);
    for (int b : t.vars[v].children) {
      if (b == excluded_clause) continue;
      T u(1);
      for (int w : t.clauses[b].children)
        u = u * s.beta_var[ix.var_parent_edge[w]][1];
      if (t.clauses[b].parent_sign == edge_sign)
        pi_plus = pi_plus * (T(1) - u);
      else
        pi_minus = pi_minus * (T(1) - u);
    }
    // downward input from the parent clause, when it is not the target
    if (t.vars[v].parent >= 0 && t.vars[v].parent != excluded_clause) {
      int pe = ix.var_parent_edge[v];
      T u = s.uhat_cls[pe];
      if (ix.var_parent_sign[v] == edge_sign)
        pi_plus = pi_plus * (T(1) - u);
      else
        pi_minus = pi_minus * (T(1) - u);
    }
    return measure_from_pi(pi_plus, pi_minus);
  };

  // upward pass: deepest level first; within a level, clause up-messages
  // (which read their children) before variable up-messages (which read
  // those clauses)
  for (size_t lvl = ix.var_levels.size(); lvl-- > 0;) {
    for (int c : ix.clause_levels[lvl]) {
      T u(1);
      for (int w : t.clauses[c].children)
        u = u * s.beta_var[ix.var_parent_edge[w]][1];
      s.uhat_cls[ix.offsets[c]] = u;
    }
    for (int v : ix.var_levels[lvl]) {
      if (t.vars[v].parent < 0) continue;
      s.beta_var[ix.var_parent_edge[v]] =
          var_measure_toward(v, t.vars[v].parent, ix.var_parent_sign[v]);
    }
  }
  // root marginal toward the phantom edge
  s.root_beta = var_measure_toward(0, -1, t.root_edge_sign);

  // downward pass: shallowest first; variables before their child clauses
  for (size_t lvl = 0; lvl < ix.var_levels.size(); lvl++) {
    for (int v : ix.var_levels[lvl]) {
      for (int b : t.vars[v].children)
        s.beta_var[ix.offsets[b]] =
            var_measure_toward(v, b, t.clauses[b].parent_sign);
    }
    for (int c : ix.clause_levels[lvl]) {
      const auto& ch = t.clauses[c].children;
      for (size_t i = 0; i < ch.size(); i++) {
        T u = s.beta_var[ix.offsets[c]][1];  // parent variable toward c
        for (size_t j = 0; j < ch.size(); j++) {
          if (j == i) continue;
          u = u * s.beta_var[ix.var_parent_edge[ch[j]]][1];
        }
        s.uhat_cls[ix.offsets[c] + 1 + static_cast<int>(i)] = u;
      }
    }
  }
  return s;
}

template <class T>
std::array<T, 3> tree_frozen_marginal(const FactorTree& t) {
  return solve_tree_etas<T>(t).root_beta;
}

std::array<Rational, 3> wp_enumeration_marginal(const FactorTree& t) {
  std::vector<int> boundary;
  for (int v = 0; v < t.var_count(); v++)
    if (t.vars[v].boundary) boundary.push_back(v);
  if (boundary.size() > 20)
    throw BudgetExceeded("budget: wp_enumeration_marginal boundary > 20");

  TreeIndex ix = build_index(t);
  int64_t valid = 0;
  std::array<int64_t, 3> tally{0, 0, 0};  // +, -, f at the root

  for (int64_t mask = 0; mask < (int64_t(1) << boundary.size()); mask++) {
    // warning of each variable toward its parent: +1/-1/0, 2 = invalid
    std::vector<int> up(t.var_count(), 0);
    std::vector<int> uhat(t.clause_count(), 0);  // clause warning: 1 = +, 0 = f
    for (size_t i = 0; i < boundary.size(); i++)
      up[boundary[i]] = (mask >> i) & 1 ? 1 : -1;

    bool ok = true;
    auto wp_var = [&](int v, int excluded_clause, int8_t edge_sign) -> int {
      if (t.vars[v].boundary) return up[v];
      bool same_plus = false, opp_plus = false;
      for (int b : t.vars[v].children) {
        if (b == excluded_clause || uhat[b] != 1) continue;
        if (t.clauses[b].parent_sign == edge_sign)
          same_plus = true;
        else
          opp_plus = true;
      }
      if (same_plus && opp_plus) return 2;
      if (same_plus) return 1;
      if (opp_plus) return -1;
      return 0;
    };

    for (size_t lvl = ix.var_levels.size(); ok && lvl-- > 0;) {
      for (int c : ix.clause_levels[lvl]) {
        bool all_neg = true;
        for (int w : t.clauses[c].children)
          if (up[w] != -1) all_neg = false;
        uhat[c] = all_neg ? 1 : 0;
      }
      for (int v : ix.var_levels[lvl]) {
        if (t.vars[v].parent < 0 || t.vars[v].boundary) continue;
        int w = wp_var(v, t.vars[v].parent, ix.var_parent_sign[v]);
        if (w == 2) {
          ok = false;
          break;
        }
        up[v] = w;
      }
    }
    if (!ok) continue;
    int root = wp_var(0, -1, t.root_edge_sign);
    if (root == 2) continue;
    valid++;
    tally[root == 1 ? 0 : (root == -1 ? 1 : 2)]++;
  }
  if (valid == 0)
    throw std::runtime_error("wp_enumeration_marginal: no valid completion");
  return {Rational(tally[0], valid), Rational(tally[1], valid),
          Rational(tally[2], valid)};
}

// ---------------------------------------------------------------------------

WeightSet WeightSet::identity(const FactorTree& t) {
  WeightSet w;
  int E = tree_edge_count(t);
  w.gamma.assign(E, {1.0, 1.0, 1.0, 1.0});
  w.lam_var.assign(t.var_count(), {1.0, 1.0, 1.0});
  w.lam_edge_r.assign(E, 1.0);
  return w;
}

namespace {

inline int spin_index(Spin s) { return s > 0 ? 0 : (s < 0 ? 1 : 2); }

}  // namespace

ColorDist bp_variable(const std::vector<BpVarIncoming>& in, int8_t target_sign,
                      double target_lam_r, const std::array<double, 3>& lam_v,
                      bool boundary, double* log_z) {
  ColorDist out{0, 0, 0, 0};
  if (boundary) {
    if (!in.empty())
      throw std::invalid_argument("bp_variable: boundary variable with children");
    out[kR] = lam_v[spin_index(ev_of(kR, target_sign))] * target_lam_r;
    out[kY] = lam_v[spin_index(ev_of(kY, target_sign))];
    out[kG] = lam_v[spin_index(ev_of(kG, target_sign))];
    out[kB] = lam_v[spin_index(ev_of(kB, target_sign))];
  } else {
    double all_g = 1.0;
    for (const auto& e : in) all_g *= e.qhat[kG];
    out[kG] = lam_v[2] * all_g;
    for (Spin x : {Spin(1), Spin(-1)}) {
      double purple = 1.0, blue = 1.0, yellow = 1.0;
      for (const auto& e : in) {
        if (e.sign == x)
          purple *= e.qhat[kR] * e.lam_r + e.qhat[kB];
        else
          yellow *= e.qhat[kY];
      }
      for (const auto& e : in)
        if (e.sign == x) blue *= e.qhat[kB];
      double lv = lam_v[spin_index(x)];
      if (x == target_sign) {
        out[kR] = lv * target_lam_r * yellow * purple;
        out[kB] = lv * yellow * (purple - blue);
      } else {
        out[kY] = lv * yellow * (purple - blue);
      }
    }
  }
  double z = out[0] + out[1] + out[2] + out[3];
  if (!(z > 0))
    throw std::runtime_error("bp_variable: zero normalizer (contradictory boundary)");
  for (auto& v : out) v /= z;
  if (log_z) *log_z = std::log(z);
  return out;
}

ColorDist bp_clause(const std::vector<BpClauseIncoming>& in,
                    const std::array<double, 4>& target_gamma, double* log_z) {
  const size_t d = in.size();
  std::vector<double> A(d), R(d), C(d);
  for (size_t i = 0; i < d; i++) {
    A[i] = in[i].qdot[kY] * in[i].gamma[kY];
    R[i] = in[i].qdot[kR] * in[i].gamma[kR];
    C[i] = in[i].qdot[kG] * in[i].gamma[kG] + in[i].qdot[kB] * in[i].gamma[kB];
  }
  // prefix/suffix products of A for the leave-one-out sums
  std::vector<double> pre(d + 1, 1.0), suf(d + 1, 1.0);
  for (size_t i = 0; i < d; i++) pre[i + 1] = pre[i] * A[i];
  for (size_t i = d; i-- > 0;) suf[i] = suf[i + 1] * A[i];
  double prod_a = pre[d];
  double prod_n = 1.0;
  for (size_t i = 0; i < d; i++) prod_n *= A[i] + C[i];
  double sum_r = 0.0, sum_c = 0.0;
  for (size_t i = 0; i < d; i++) {
    sum_r += R[i] * pre[i] * suf[i + 1];
    sum_c += C[i] * pre[i] * suf[i + 1];
  }
  ColorDist out;
  out[kR] = target_gamma[kR] * prod_a;
  out[kY] = target_gamma[kY] * (sum_r + std::max(0.0, prod_n - prod_a - sum_c));
  out[kG] = target_gamma[kG] * std::max(0.0, prod_n - prod_a);
  out[kB] = target_gamma[kB] * std::max(0.0, prod_n - prod_a);
  double z = out[0] + out[1] + out[2] + out[3];
  if (!(z > 0)) throw std::runtime_error("bp_clause: zero normalizer");
  for (auto& v : out) v /= z;
  if (log_z) *log_z = std::log(z);
  return out;
}

namespace {

struct EdgePeers {
  // incoming messages to a variable from all clauses except `excluded`
  static std::vector<BpVarIncoming> var_incoming(const FactorTree& t,
                                                 const TreeIndex& ix,
                                                 const WeightSet& w,
                                                 const MessageSet& ms, int v,
                                                 int excluded_clause) {
    std::vector<BpVarIncoming> in;
    for (int b : t.vars[v].children) {
      if (b == excluded_clause) continue;
      int e = ix.offsets[b];
      in.push_back({ms.q_cls[e], t.clauses[b].parent_sign, w.lam_edge_r[e]});
    }
    if (t.vars[v].parent >= 0 && t.vars[v].parent != excluded_clause) {
      int e = ix.var_parent_edge[v];
      in.push_back({ms.q_cls[e], ix.var_parent_sign[v], w.lam_edge_r[e]});
    }
    return in;
  }

  // incoming messages to clause c from all variables except slot `skip`
  // (slot 0 = parent, 1+i = child i)
  static std::vector<BpClauseIncoming> clause_incoming(const FactorTree& t,
                                                       const TreeIndex& ix,
                                                       const WeightSet& w,
                                                       const MessageSet& ms,
                                                       int c, int skip) {
    std::vector<BpClauseIncoming> in;
    int base = ix.offsets[c];
    if (skip != 0)
      in.push_back({ms.q_var[base], w.gamma[base]});
    for (size_t i = 0; i < t.clauses[c].children.size(); i++) {
      int slot = 1 + static_cast<int>(i);
      if (slot == skip) continue;
      in.push_back({ms.q_var[base + slot], w.gamma[base + slot]});
    }
    return in;
  }
};

}  // namespace

MessageSet solve_tree_bp(const FactorTree& t, const WeightSet& w) {
  TreeIndex ix = build_index(t);
  const int E = ix.offsets.back();
  MessageSet ms;
  ms.q_var.assign(E, ColorDist{0.25, 0.25, 0.25, 0.25});
  ms.q_cls.assign(E, ColorDist{0.25, 0.25, 0.25, 0.25});
  ms.log_zdot_edge.assign(E, 0.0);
  ms.log_zhat_edge.assign(E, 0.0);
  ms.log_zbar_edge.assign(E, 0.0);
  ms.log_zdot_var.assign(t.var_count(), 0.0);
  ms.log_zhat_cls.assign(t.clause_count(), 0.0);

  for (int v = 0; v < t.var_count(); v++)
    if (t.vars[v].boundary && !t.vars[v].children.empty())
      throw std::invalid_argument("solve_tree_bp: boundary variable with children");

  // upward: deepest level first; clause messages (reading child variables
  // one level down) before the level's variable messages
  for (size_t lvl = ix.var_levels.size(); lvl-- > 0;) {
    for (int c : ix.clause_levels[lvl]) {
      int e = ix.offsets[c];
      auto in = EdgePeers::clause_incoming(t, ix, w, ms, c, 0);
      ms.q_cls[e] = bp_clause(in, w.gamma[e], &ms.log_zhat_edge[e]);
    }
    for (int v : ix.var_levels[lvl]) {
      if (t.vars[v].parent < 0) continue;
      int e = ix.var_parent_edge[v];
      auto in = EdgePeers::var_incoming(t, ix, w, ms, v, t.vars[v].parent);
      ms.q_var[e] = bp_variable(in, ix.var_parent_sign[v], w.lam_edge_r[e],
                                w.lam_var[v], t.vars[v].boundary,
                                &ms.log_zdot_edge[e]);
    }
  }
  // downward: shallowest first; variables before their child clauses
  for (size_t lvl = 0; lvl < ix.var_levels.size(); lvl++) {
    for (int v : ix.var_levels[lvl]) {
      for (int b : t.vars[v].children) {
        int e = ix.offsets[b];
        auto in = EdgePeers::var_incoming(t, ix, w, ms, v, b);
        ms.q_var[e] = bp_variable(in, t.clauses[b].parent_sign, w.lam_edge_r[e],
                                  w.lam_var[v], t.vars[v].boundary,
                                  &ms.log_zdot_edge[e]);
      }
    }
    for (int c : ix.clause_levels[lvl]) {
      for (size_t i = 0; i < t.clauses[c].children.size(); i++) {
        int slot = 1 + static_cast<int>(i);
        int e = ix.offsets[c] + slot;
        auto in = EdgePeers::clause_incoming(t, ix, w, ms, c, slot);
        ms.q_cls[e] = bp_clause(in, w.gamma[e], &ms.log_zhat_edge[e]);
      }
    }
  }
  // normalizers
  for (int e = 0; e < E; e++) {
    double zbar;
    edge_marginal(ms.q_var[e], ms.q_cls[e], &zbar);
    ms.log_zbar_edge[e] = std::log(zbar);
  }
  for (int v = 0; v < t.var_count(); v++) {
    auto in = EdgePeers::var_incoming(t, ix, w, ms, v, -1);
    if (t.vars[v].boundary) {
      int e = ix.var_parent_edge[v];
      const ColorDist& qh = ms.q_cls[e];
      double z = 0;
      for (int s = 0; s < 4; s++) {
        double lw = w.lam_var[v][spin_index(ev_of(static_cast<uint8_t>(s),
                                                  ix.var_parent_sign[v]))] *
                    (s == kR ? w.lam_edge_r[e] : 1.0);
        z += lw * qh[s];
      }
      if (!(z > 0)) throw std::runtime_error("solve_tree_bp: zero vertex normalizer");
      ms.log_zdot_var[v] = std::log(z);
      continue;
    }
    double all_g = 1.0;
    for (const auto& inc : in) all_g *= inc.qhat[kG];
    double z = w.lam_var[v][2] * all_g;
    for (Spin x : {Spin(1), Spin(-1)}) {
      double purple = 1.0, blue = 1.0, yellow = 1.0;
      for (const auto& inc : in) {
        if (inc.sign == x) {
          purple *= inc.qhat[kR] * inc.lam_r + inc.qhat[kB];
          blue *= inc.qhat[kB];
        } else {
          yellow *= inc.qhat[kY];
        }
      }
      z += w.lam_var[v][spin_index(x)] * yellow * (purple - blue);
    }
    if (!(z > 0)) throw std::runtime_error("solve_tree_bp: zero vertex normalizer");
    ms.log_zdot_var[v] = std::log(z);
  }
  for (int c = 0; c < t.clause_count(); c++) {
    auto in = EdgePeers::clause_incoming(t, ix, w, ms, c, -1);
    const size_t d = in.size();
    std::vector<double> A(d), R(d), C(d);
    for (size_t i = 0; i < d; i++) {
      A[i] = in[i].qdot[kY] * in[i].gamma[kY];
      R[i] = in[i].qdot[kR] * in[i].gamma[kR];
      C[i] = in[i].qdot[kG] * in[i].gamma[kG] + in[i].qdot[kB] * in[i].gamma[kB];
    }
    std::vector<double> pre(d + 1, 1.0), suf(d + 1, 1.0);
    for (size_t i = 0; i < d; i++) pre[i + 1] = pre[i] * A[i];
    for (size_t i = d; i-- > 0;) suf[i] = suf[i + 1] * A[i];
    double prod_a = pre[d], prod_n = 1.0, sum_r = 0.0, sum_c = 0.0;
    for (size_t i = 0; i < d; i++) prod_n *= A[i] + C[i];
    for (size_t i = 0; i < d; i++) {
      sum_r += R[i] * pre[i] * suf[i + 1];
      sum_c += C[i] * pre[i] * suf[i + 1];
    }
    double z = sum_r + std::max(0.0, prod_n - prod_a - sum_c);
    if (!(z > 0)) throw std::runtime_error("solve_tree_bp: zero clause normalizer");
    ms.log_zhat_cls[c] = std::log(z);
  }
  return ms;
}

ColorDist edge_marginal(const ColorDist& qdot, const ColorDist& qhat,
                        double* zbar) {
  ColorDist out;
  double z = 0;
  for (int s = 0; s < 4; s++) {
    out[s] = qdot[s] * qhat[s];
    z += out[s];
  }
  if (!(z > 0)) throw std::runtime_error("edge_marginal: zero normalizer");
  for (auto& v : out) v /= z;
  if (zbar) *zbar = z;
  return out;
}

namespace {

// edges incident to a variable, in (parent-first, then children) order
std::vector<int> var_edge_ids(const FactorTree& t, const TreeIndex& ix, int v) {
  std::vector<int> ids;
  if (t.vars[v].parent >= 0) ids.push_back(ix.var_parent_edge[v]);
  for (int b : t.vars[v].children) ids.push_back(ix.offsets[b]);
  return ids;
}

std::vector<int8_t> var_edge_signs(const FactorTree& t, const TreeIndex& ix,
                                   int v) {
  std::vector<int8_t> signs;
  if (t.vars[v].parent >= 0) signs.push_back(ix.var_parent_sign[v]);
  for (int b : t.vars[v].children) signs.push_back(t.clauses[b].parent_sign);
  return signs;
}

}  // namespace

std::map<std::vector<uint8_t>, double> vertex_marginal_var(
    const FactorTree& t, const WeightSet& w, const MessageSet& ms, int v) {
  TreeIndex ix = build_index(t);
  auto ids = var_edge_ids(t, ix, v);
  auto signs = var_edge_signs(t, ix, v);
  const size_t d = ids.size();
  if (d > 12) throw BudgetExceeded("budget: vertex_marginal_var degree > 12");
  std::map<std::vector<uint8_t>, double> out;
  std::vector<uint8_t> colors(d);
  double z = 0;
  size_t total = 1;
  for (size_t i = 0; i < d; i++) total *= 4;
  for (size_t code = 0; code < total; code++) {
    size_t c = code;
    for (size_t i = 0; i < d; i++) {
      colors[i] = static_cast<uint8_t>(c & 3);
      c >>= 2;
    }
    double weight;
    if (t.vars[v].boundary) {
      // single edge; spin read off that edge
      Spin ev = ev_of(colors[0], signs[0]);
      weight = w.lam_var[v][spin_index(ev)];
    } else {
      EvResult ev = variable_factor(colors, signs);
      if (!ev.valid) continue;
      weight = w.lam_var[v][spin_index(ev.ev)];
    }
    for (size_t i = 0; i < d; i++) {
      weight *= ms.q_cls[ids[i]][colors[i]];
      if (colors[i] == kR) weight *= w.lam_edge_r[ids[i]];
    }
    if (weight > 0) {
      out[colors] += weight;
      z += weight;
    }
  }
  for (auto& [key, val] : out) val /= z;
  return out;
}

std::map<std::vector<uint8_t>, double> vertex_marginal_clause(
    const FactorTree& t, const WeightSet& w, const MessageSet& ms, int c) {
  TreeIndex ix = build_index(t);
  std::vector<int> ids;
  for (int slot = 0; slot < 1 + static_cast<int>(t.clauses[c].children.size());
       slot++)
    ids.push_back(ix.offsets[c] + slot);
  const size_t d = ids.size();
  if (d > 12) throw BudgetExceeded("budget: vertex_marginal_clause degree > 12");
  std::map<std::vector<uint8_t>, double> out;
  std::vector<uint8_t> colors(d);
  double z = 0;
  size_t total = 1;
  for (size_t i = 0; i < d; i++) total *= 4;
  for (size_t code = 0; code < total; code++) {
    size_t cc = code;
    for (size_t i = 0; i < d; i++) {
      colors[i] = static_cast<uint8_t>(cc & 3);
      cc >>= 2;
    }
    if (!clause_factor(colors)) continue;
    double weight = 1.0;
    for (size_t i = 0; i < d; i++)
      weight *= ms.q_var[ids[i]][colors[i]] * w.gamma[ids[i]][colors[i]];
    if (weight > 0) {
      out[colors] += weight;
      z += weight;
    }
  }
  for (auto& [key, val] : out) val /= z;
  return out;
}

WeightSet redistribute_weights(const FactorTree& t, const WeightSet& w) {
  TreeIndex ix = build_index(t);
  WeightSet r = w;
  int E = ix.offsets.back();
  r.gamma.assign(E, {1.0, 1.0, 1.0, 1.0});
  for (int v = 0; v < t.var_count(); v++) {
    auto ids = var_edge_ids(t, ix, v);
    auto signs = var_edge_signs(t, ix, v);
    double lminus = 1.0, lfree = 1.0;
    for (size_t i = 0; i < ids.size(); i++) {
      const auto& g = w.gamma[ids[i]];
      if (signs[i] > 0) {
        lminus *= g[kY] / g[kB];
        lfree *= g[kG] / g[kB];
      } else {
        lminus *= g[kB] / g[kY];
        lfree *= g[kG] / g[kY];
      }
      r.lam_edge_r[ids[i]] = w.lam_edge_r[ids[i]] * g[kR] / g[kB];
    }
    r.lam_var[v][1] = w.lam_var[v][1] * lminus;
    r.lam_var[v][2] = w.lam_var[v][2] * lfree;
  }
  return r;
}

// ---------------------------------------------------------------------------

template <class T>
std::array<T, 4> qdot_from_eta(const std::array<T, 3>& beta) {
  T z = T(2) - beta[1];
  return {(beta[0] + beta[2]) / z, beta[1] / z, beta[2] / z, beta[0] / z};
}

template <class T>
std::array<T, 4> qhat_from_uhat(const T& uhat_plus) {
  T z = T(3) - T(2) * uhat_plus;
  T rest = (T(1) - uhat_plus) / z;
  return {uhat_plus / z, rest, rest, rest};
}

MessageSet eta_to_messages(const FactorTree& t, const EtaSet& etas) {
  const int E = tree_edge_count(t);
  MessageSet ms;
  ms.q_var.resize(E);
  ms.q_cls.resize(E);
  ms.log_zdot_edge.assign(E, 0.0);
  ms.log_zhat_edge.assign(E, 0.0);
  ms.log_zbar_edge.assign(E, 0.0);
  ms.log_zdot_var.assign(t.var_count(), 0.0);
  ms.log_zhat_cls.assign(t.clause_count(), 0.0);
  for (int e = 0; e < E; e++) {
    ms.q_var[e] = qdot_from_eta(etas.beta_var[e]);
    ms.q_cls[e] = qhat_from_uhat(etas.uhat_cls[e]);
  }
  return ms;
}

// ---------------------------------------------------------------------------

namespace {

// Rooted tree extraction from an acyclic ball.
FactorTree tree_from_ball(const Ball& ball, int r) {
  if (ball.cyclic) throw std::invalid_argument("tree_from_ball: cyclic ball");
  const FactorGraph& g = ball.graph;
  FactorTree t;
  t.vars.resize(1);
  std::vector<int> var_new(g.n() + 1, -1);
  var_new[ball.root] = 0;
  std::vector<bool> clause_seen(g.m(), false);
  // BFS: (variable in ball ids, depth, tree id)
  std::vector<std::tuple<int, int, int>> frontier{{ball.root, 0, 0}};
  while (!frontier.empty()) {
    std::vector<std::tuple<int, int, int>> next;
    for (auto [v, depth, tv] : frontier) {
      if (depth == r) {
        t.vars[tv].boundary = true;
        continue;
      }
      for (const auto& occ : g.adj(v)) {
        if (clause_seen[occ.clause]) continue;
        clause_seen[occ.clause] = true;
        int tc = t.clause_count();
        t.clauses.push_back({});
        t.clauses[tc].parent = tv;
        t.clauses[tc].parent_sign = g.clause(occ.clause)[occ.slot].sign;
        t.vars[tv].children.push_back(tc);
        const auto& cl = g.clause(occ.clause);
        for (int j = 0; j < static_cast<int>(cl.size()); j++) {
          if (j == occ.slot) continue;
          int u = cl[j].var;
          int tu = t.var_count();
          t.vars.push_back({});
          t.vars[tu].parent = tc;
          var_new[u] = tu;
          t.clauses[tc].children.push_back(tu);
          t.clauses[tc].child_signs.push_back(cl[j].sign);
          next.push_back({u, depth + 1, tu});
        }
      }
    }
    frontier = std::move(next);
  }
  return t;
}

}  // namespace

CanonicalMessages canonical_messages(const FactorGraph& g, int clause, int v,
                                     int r) {
  if (r < 1) throw std::invalid_argument("canonical_messages: r >= 1 required");
  bool found = false;
  for (const auto& occ : g.adj(v))
    if (occ.clause == clause) found = true;
  if (!found)
    throw std::invalid_argument("canonical_messages: (clause, v) is not an edge");
  Ball ball = neighborhood(g, v, r);
  if (ball.cyclic)
    throw std::invalid_argument("canonical_messages: cyclic ball");
  FactorTree t = tree_from_ball(ball, r);
  // locate the tree clause that came from `clause`: children of the root in
  // order of g.adj(ball-root); rebuild the mapping the same way
  int target = -1;
  {
    int idx = 0;
    for (const auto& occ : ball.graph.adj(ball.root)) {
      if (ball.clause_of[occ.clause] == clause &&
          g.clause(clause)[occ.slot].var == v) {
        target = t.vars[0].children[idx];
        break;
      }
      idx++;
    }
  }
  if (target < 0)
    throw std::invalid_argument("canonical_messages: edge not found in ball");
  auto etas = solve_tree_etas<double>(t);
  auto off = tree_edge_offsets(t);
  CanonicalMessages cm;
  cm.beta = etas.beta_var[off[target]];
  cm.uhat = etas.uhat_cls[off[target]];
  cm.qdot = qdot_from_eta(cm.beta);
  cm.qhat = qhat_from_uhat(cm.uhat);
  cm.pi = edge_marginal(cm.qdot, cm.qhat);
  return cm;
}

CoherenceReport coherence_check(const FactorGraph& g, int clause, int r) {
  const auto& cl = g.clause(clause);
  CoherenceReport rep;
  for (const Lit& l : cl)
    rep.pi.push_back(canonical_messages(g, clause, l.var, r).pi);
  const size_t d = rep.pi.size();
  for (size_t e = 0; e < d; e++) {
    double others_r = 0, others_c = 0;
    for (size_t e2 = 0; e2 < d; e2++) {
      if (e2 == e) continue;
      others_r += rep.pi[e2][kR];
      others_c += rep.pi[e2][kG] + rep.pi[e2][kB];
    }
    double own_c = rep.pi[e][kG] + rep.pi[e][kB];
    rep.red_slack.push_back(rep.pi[e][kY] - others_r);
    rep.cyan_slack.push_back(others_c - own_c);
    if (rep.red_slack.back() < 0 || rep.cyan_slack.back() < 0)
      rep.coherent = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------

TreeFixture parse_tree_fixture(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FactorTree t;
  struct GammaLine {
    int c, v;
    std::array<double, 4> g;
  };
  struct LamVLine {
    int v;
    double minus, f;
  };
  struct LamRLine {
    int c, v;
    double r;
  };
  std::vector<GammaLine> gammas;
  std::vector<LamVLine> lamvs;
  std::vector<LamRLine> lamrs;
  std::vector<int> boundary_ids;
  int lineno = 0;
  auto fail = [&](const std::string& m) {
    throw std::runtime_error("tree fixture line " + std::to_string(lineno) +
                             ": " + m);
  };
  auto parse_sign = [&](const std::string& s) -> int8_t {
    if (s == "+") return 1;
    if (s == "-") return -1;
    fail("bad sign " + s);
    return 1;
  };
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "var") {
      int id;
      std::string parent, sign;
      if (!(ls >> id >> parent)) fail("malformed var line");
      if (id != t.var_count() + 1) fail("var ids must be declared 1,2,...");
      FactorTree::Var v;
      if (parent != "-") {
        if (!(ls >> sign)) fail("missing edge sign");
        v.parent = std::stoi(parent) - 1;
        if (v.parent < 0 || v.parent >= t.clause_count())
          fail("unknown parent clause");
      } else if (t.var_count() != 0) {
        fail("only variable 1 may be the root");
      }
      t.vars.push_back(v);
      if (v.parent >= 0) {
        t.clauses[v.parent].children.push_back(t.var_count() - 1);
        t.clauses[v.parent].child_signs.push_back(parse_sign(sign));
      }
    } else if (kind == "clause") {
      int id, pv;
      std::string sign;
      if (!(ls >> id >> pv >> sign)) fail("malformed clause line");
      if (id != t.clause_count() + 1) fail("clause ids must be declared 1,2,...");
      if (pv < 1 || pv > t.var_count()) fail("unknown parent variable");
      FactorTree::Clause c;
      c.parent = pv - 1;
      c.parent_sign = parse_sign(sign);
      t.clauses.push_back(c);
      t.vars[pv - 1].children.push_back(t.clause_count() - 1);
    } else if (kind == "boundary") {
      int id;
      while (ls >> id) boundary_ids.push_back(id);
    } else if (kind == "rootsign") {
      std::string s;
      if (!(ls >> s)) fail("missing root sign");
      t.root_edge_sign = parse_sign(s);
    } else if (kind == "gamma") {
      GammaLine gl;
      if (!(ls >> gl.c >> gl.v >> gl.g[0] >> gl.g[1] >> gl.g[2] >> gl.g[3]))
        fail("malformed gamma line");
      gammas.push_back(gl);
    } else if (kind == "lambdav") {
      LamVLine lv;
      if (!(ls >> lv.v >> lv.minus >> lv.f)) fail("malformed lambdav line");
      lamvs.push_back(lv);
    } else if (kind == "lambdar") {
      LamRLine lr;
      if (!(ls >> lr.c >> lr.v >> lr.r)) fail("malformed lambdar line");
      lamrs.push_back(lr);
    } else {
      fail("unknown directive " + kind);
    }
  }
  if (t.var_count() == 0) throw std::runtime_error("tree fixture: empty");
  for (int id : boundary_ids) {
    if (id < 1 || id > t.var_count())
      throw std::runtime_error("tree fixture: bad boundary id");
    t.vars[id - 1].boundary = true;
  }
  // fix parent links for the variables declared before their parent clause
  // (declaration order guarantees parents precede children, so nothing to do)
  TreeFixture fix{t, WeightSet::identity(t)};
  auto ix_off = tree_edge_offsets(t);
  auto edge_of = [&](int c, int v) -> int {
    c -= 1;
    v -= 1;
    if (c < 0 || c >= t.clause_count()) throw std::runtime_error("bad clause id");
    if (t.clauses[c].parent == v) return ix_off[c];
    for (size_t i = 0; i < t.clauses[c].children.size(); i++)
      if (t.clauses[c].children[i] == v)
        return ix_off[c] + 1 + static_cast<int>(i);
    throw std::runtime_error("tree fixture: no such edge");
  };
  for (const auto& gl : gammas) fix.weights.gamma[edge_of(gl.c, gl.v)] = gl.g;
  for (const auto& lv : lamvs) {
    if (lv.v < 1 || lv.v > t.var_count())
      throw std::runtime_error("tree fixture: bad lambdav id");
    fix.weights.lam_var[lv.v - 1] = {1.0, lv.minus, lv.f};
  }
  for (const auto& lr : lamrs)
    fix.weights.lam_edge_r[edge_of(lr.c, lr.v)] = lr.r;
  return fix;
}

std::string emit_tree_fixture(const FactorTree& t, const WeightSet& w) {
  std::ostringstream out;
  out.precision(17);
  out << "rootsign " << (t.root_edge_sign > 0 ? "+" : "-") << "\n";
  TreeIndex ix = build_index(t);
  // renumber in level order so parents always precede children
  std::vector<int> var_id(t.var_count(), 0), cls_id(t.clause_count(), 0);
  {
    int nv = 0, nc = 0;
    for (size_t lvl = 0; lvl < ix.var_levels.size(); lvl++) {
      for (int v : ix.var_levels[lvl]) var_id[v] = ++nv;
      for (int c : ix.clause_levels[lvl]) cls_id[c] = ++nc;
    }
  }
  for (size_t lvl = 0; lvl < ix.var_levels.size(); lvl++) {
    for (int v : ix.var_levels[lvl]) {
      out << "var " << var_id[v] << " ";
      if (t.vars[v].parent < 0)
        out << "-";
      else
        out << cls_id[t.vars[v].parent] << " "
            << (ix.var_parent_sign[v] > 0 ? "+" : "-");
      out << "\n";
    }
    for (int c : ix.clause_levels[lvl])
      out << "clause " << cls_id[c] << " " << var_id[t.clauses[c].parent] << " "
          << (t.clauses[c].parent_sign > 0 ? "+" : "-") << "\n";
  }
  bool any_boundary = false;
  for (int v = 0; v < t.var_count(); v++)
    if (t.vars[v].boundary) any_boundary = true;
  if (any_boundary) {
    out << "boundary";
    for (int v = 0; v < t.var_count(); v++)
      if (t.vars[v].boundary) out << " " << var_id[v];
    out << "\n";
  }
  auto off = tree_edge_offsets(t);
  for (int c = 0; c < t.clause_count(); c++) {
    for (int slot = 0; slot < 1 + static_cast<int>(t.clauses[c].children.size());
         slot++) {
      int e = off[c] + slot;
      int v = slot == 0 ? t.clauses[c].parent : t.clauses[c].children[slot - 1];
      const auto& g = w.gamma[e];
      if (g != std::array<double, 4>{1, 1, 1, 1})
        out << "gamma " << cls_id[c] << " " << var_id[v] << " " << g[0] << " "
            << g[1] << " " << g[2] << " " << g[3] << "\n";
      if (w.lam_edge_r[e] != 1.0)
        out << "lambdar " << cls_id[c] << " " << var_id[v] << " "
            << w.lam_edge_r[e] << "\n";
    }
  }
  for (int v = 0; v < t.var_count(); v++) {
    const auto& lv = w.lam_var[v];
    if (lv[1] != 1.0 || lv[2] != 1.0)
      out << "lambdav " << var_id[v] << " " << lv[1] << " " << lv[2] << "\n";
  }
  return out.str();
}

// explicit instantiations
template std::array<double, 3> eta_recursion_measure<double>(
    const std::vector<EtaChild<double>>&);
template std::array<Rational, 3> eta_recursion_measure<Rational>(
    const std::vector<EtaChild<Rational>>&);
template double eta_recursion<double>(const std::vector<EtaChild<double>>&);
template Rational eta_recursion<Rational>(const std::vector<EtaChild<Rational>>&);
template EtaSetT<double> solve_tree_etas<double>(const FactorTree&);
template EtaSetT<Rational> solve_tree_etas<Rational>(const FactorTree&);
template std::array<double, 3> tree_frozen_marginal<double>(const FactorTree&);
template std::array<Rational, 3> tree_frozen_marginal<Rational>(const FactorTree&);
template std::array<double, 4> qdot_from_eta<double>(const std::array<double, 3>&);
template std::array<Rational, 4> qdot_from_eta<Rational>(
    const std::array<Rational, 3>&);
template std::array<double, 4> qhat_from_uhat<double>(const double&);
template std::array<Rational, 4> qhat_from_uhat<Rational>(const Rational&);

}  // namespace ksat
