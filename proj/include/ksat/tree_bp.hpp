#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ksat/cluster_models.hpp"
#include "ksat/factor_graph.hpp"
#include "ksat/rational.hpp"

namespace ksat {

// Edge indexing on a FactorTree: clause c owns edge block
// [offset[c], offset[c] + 1 + children); slot 0 is the parent edge,
// slot 1+i the edge to child i.
std::vector<int> tree_edge_offsets(const FactorTree& t);
int tree_edge_count(const FactorTree& t);

// ---------------------------------------------------------------------------
// Frozen-model tree recursions. bη_{va} is a measure on {+,-,f}; stored as
// (plus, minus, free). bû_{av} is determined by its (+) mass. The scalar
// recursion input is eta = bη(-), the probability that the variable negates
// the literal on its edge.

template <class T>
struct EtaChild {
  bool same_sign;        // L_bv equal to the sign of the target edge
  std::vector<T> etas;   // grandchild etas (one per u in ∂b\v)
};

// eta_va = Pi+ (1 - Pi-) / (Pi+ + Pi- - Pi+ Pi-); the full measure R_va.
template <class T>
std::array<T, 3> eta_recursion_measure(const std::vector<EtaChild<T>>& children);
template <class T>
T eta_recursion(const std::vector<EtaChild<T>>& children);

// Per-directed-edge recursion results on a tree.
template <class T>
struct EtaSetT {
  std::vector<std::array<T, 3>> beta_var;  // edge -> bη_{v->a}
  std::vector<T> uhat_cls;                 // edge -> bû_{a->v}(+)
  std::array<T, 3> root_beta;              // bη_{root->phantom}
};
using EtaSet = EtaSetT<double>;

// Two-pass computation of every directed-edge measure. Boundary variables
// contribute bη = (1/2, 1/2, 0); internal childless variables fall out of
// the recursion with bη = (0, 0, 1).
template <class T>
EtaSetT<T> solve_tree_etas(const FactorTree& t);

// Marginal law of the root-to-phantom warning, F(T).
template <class T>
std::array<T, 3> tree_frozen_marginal(const FactorTree& t);

// Independent oracle: enumerate the 2^(#boundary) rigid balanced inputs,
// run warning propagation upward, discard ill-defined completions, and
// tally the root warning. Throws if every input is invalid. Budget:
// #boundary <= 20.
std::array<Rational, 3> wp_enumeration_marginal(const FactorTree& t);

// ---------------------------------------------------------------------------
// Weighted color-model BP. Messages are probability vectors over (r,y,g,b).

using ColorDist = std::array<double, 4>;

struct WeightSet {
  std::vector<std::array<double, 4>> gamma;   // per edge, gamma(y)=1 anchored
  std::vector<std::array<double, 3>> lam_var; // per var: (+,-,f), (+)=1 anchored
  std::vector<double> lam_edge_r;             // per edge: lambda_e(r)
  static WeightSet identity(const FactorTree& t);
};

// Variable-to-clause message. `boundary` selects the relaxed leaf factor
// (spin determined by the edge alone, weighted by lam_v[ev]); otherwise the
// full variable factor applies. Writes log of the normalizer if requested.
struct BpVarIncoming {
  ColorDist qhat;
  int8_t sign;      // literal sign of the incoming edge
  double lam_r;     // lambda_e(r) of the incoming edge
};
ColorDist bp_variable(const std::vector<BpVarIncoming>& in, int8_t target_sign,
                      double target_lam_r, const std::array<double, 3>& lam_v,
                      bool boundary, double* log_z = nullptr);

struct BpClauseIncoming {
  ColorDist qdot;
  std::array<double, 4> gamma;
};
ColorDist bp_clause(const std::vector<BpClauseIncoming>& in,
                    const std::array<double, 4>& target_gamma,
                    double* log_z = nullptr);

struct MessageSet {
  std::vector<ColorDist> q_var;  // edge -> q̇ (variable to clause)
  std::vector<ColorDist> q_cls;  // edge -> q̂ (clause to variable)
  std::vector<double> log_zdot_edge;  // ż_{va}
  std::vector<double> log_zhat_edge;  // ẑ_{av}
  std::vector<double> log_zbar_edge;  // z̄_{av}
  std::vector<double> log_zdot_var;   // ż_v per variable
  std::vector<double> log_zhat_cls;   // ẑ_a per clause
};

// Exact fixed point on a finite tree by an upward and a downward pass.
MessageSet solve_tree_bp(const FactorTree& t, const WeightSet& w);

// nu_av(sigma) = q̇ q̂ / z̄.
ColorDist edge_marginal(const ColorDist& qdot, const ColorDist& qhat,
                        double* zbar = nullptr);

// Distribution over local colorings sigma_{δx}, keyed by color tuples.
// Enumerative; degree budget 12.
std::map<std::vector<uint8_t>, double> vertex_marginal_var(
    const FactorTree& t, const WeightSet& w, const MessageSet& ms, int v);
std::map<std::vector<uint8_t>, double> vertex_marginal_clause(
    const FactorTree& t, const WeightSet& w, const MessageSet& ms, int c);

// Moves clause-side gamma weights onto variables (lambda), leaving clauses
// unweighted; the Gibbs measure is unchanged up to a global constant.
WeightSet redistribute_weights(const FactorTree& t, const WeightSet& w);

// ---------------------------------------------------------------------------
// eta -> color-model message correspondence.

template <class T>
std::array<T, 4> qdot_from_eta(const std::array<T, 3>& beta);
template <class T>
std::array<T, 4> qhat_from_uhat(const T& uhat_plus);

// Converts every directed edge; the result solves the BP equations of the
// color model with lam_v(f) = 0 at boundary leaves.
MessageSet eta_to_messages(const FactorTree& t, const EtaSet& etas);

// ---------------------------------------------------------------------------
// Canonical messages and coherence on a (locally tree-like) graph.

struct CanonicalMessages {
  ColorDist qdot, qhat, pi;
  std::array<double, 3> beta;
  double uhat;
};
// Computed from the radius-r ball around v (r a positive integer); throws
// if the ball is cyclic or (a,v) is not an edge.
CanonicalMessages canonical_messages(const FactorGraph& g, int clause, int v,
                                     int r);

struct CoherenceReport {
  bool coherent = true;
  // per edge of the clause: slack of each inequality (>= 0 iff satisfied)
  std::vector<double> red_slack;   // ⋆π_e(y) - Σ_{e'≠e} ⋆π_{e'}(r)
  std::vector<double> cyan_slack;  // Σ_{e'≠e} ⋆π_{e'}(c) - ⋆π_e(c)
  std::vector<ColorDist> pi;
};
CoherenceReport coherence_check(const FactorGraph& g, int clause, int r);

// ---------------------------------------------------------------------------
// Tree fixture text format: line-oriented, one vertex per line in
// declaration order ("var <id> <parent-clause|-> [sign]",
// "clause <id> <parent-var> <sign>"), optional "boundary <ids...>",
// "rootsign <+|->", and weight overrides
// ("gamma <clause> <var> r y g b", "lambdav <var> minus f",
//  "lambdar <clause> <var> value").
struct TreeFixture {
  FactorTree tree;
  WeightSet weights;
};
TreeFixture parse_tree_fixture(const std::string& text);
std::string emit_tree_fixture(const FactorTree& t, const WeightSet& w);

}  // namespace ksat
