#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ksat/rng.hpp"

namespace ksat {

// A signed occurrence of a variable in a clause. Variables are 1-based
// (DIMACS convention); sign +1 means the positive literal.
struct Lit {
  int var = 0;
  int8_t sign = 1;
  bool operator==(const Lit&) const = default;
};

// k-SAT instance as a bipartite factor graph. Edge identity is
// (clause index, slot), so a variable repeated within a clause keeps
// distinguishable edges. Immutable after construction.
class FactorGraph {
 public:
  FactorGraph() = default;
  FactorGraph(int n, int k, std::vector<std::vector<Lit>> clauses);

  int n() const { return n_; }
  int k() const { return k_; }
  int m() const { return static_cast<int>(clauses_.size()); }
  const std::vector<Lit>& clause(int a) const { return clauses_[a]; }
  const std::vector<std::vector<Lit>>& clauses() const { return clauses_; }

  struct Occurrence {
    int clause;
    int slot;
  };
  // occurrences of variable v (1-based), in (clause, slot) order
  const std::vector<Occurrence>& adj(int v) const { return adj_[v]; }

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<Occurrence>> adj_;
};

enum class InstanceMode { poisson, fixed_m };

struct InstanceParams {
  int n = 0;
  int k = 0;
  double alpha = 0.0;        // used in poisson mode; recorded in snapshots
  InstanceMode mode = InstanceMode::poisson;
  int m = -1;                // required iff mode == fixed_m
  uint64_t seed = 0;
};

// Clauses i.i.d.; each clause is k i.i.d. uniform signed literals (repeats
// and tautologies permitted). Deterministic in (params.seed).
FactorGraph generate_instance(const InstanceParams& params);

// Rooted bipartite tree. Distances follow the half-integer edge-length
// convention: variables sit at integer depths, clauses at half-integers.
// vars[0] is the root. `boundary` marks the variables that receive i.i.d.
// rigid balanced input in the frozen-model recursions; for sampled trees
// these are the variables at the truncation depth.
struct FactorTree {
  struct Var {
    int parent = -1;  // parent clause, -1 for root
    std::vector<int> children;
    bool boundary = false;
    uint64_t label = 0;
  };
  struct Clause {
    int parent = -1;  // parent variable
    int8_t parent_sign = 1;
    std::vector<int> children;       // child variables
    std::vector<int8_t> child_signs;
  };
  std::vector<Var> vars;
  std::vector<Clause> clauses;
  int8_t root_edge_sign = 1;  // sign of the phantom edge above the root

  int var_count() const { return static_cast<int>(vars.size()); }
  int clause_count() const { return static_cast<int>(clauses.size()); }
  // degree of clause c including its parent edge
  int clause_degree(int c) const {
    return static_cast<int>(clauses[c].children.size()) + 1;
  }
  FactorGraph to_graph() const;  // 1-based variables in tree order
};

// Poisson Galton-Watson tree: each variable spawns Pois(alpha*k) child
// clauses, each clause spawns k-1 child variables; signs i.i.d. uniform.
// Truncated at `depth` (a nonnegative multiple of 1/2); variables at the
// truncation depth are flagged boundary.
FactorTree sample_pgw_tree(double alpha, int k, double depth, uint64_t seed);

struct Assignment {
  std::vector<int8_t> value;  // 1-based, entries +1/-1
  explicit Assignment(int n = 0) : value(n + 1, 1) {}
};

// DIMACS CNF with uniform clause width. Parse errors carry 1-based line
// numbers. emit writes "p cnf n m" and 0-terminated clauses; the optional
// comment carries the generation snapshot.
FactorGraph parse_dimacs(const std::string& text);
std::string emit_dimacs(const FactorGraph& g, const std::string& comment = "");
std::string instance_snapshot_comment(const InstanceParams& params);

// Induced ball of the given radius (multiple of 1/2) around variable v.
struct Ball {
  FactorGraph graph;          // induced subgraph, variables renumbered
  int root = 0;               // root variable in the new numbering
  bool cyclic = false;
  std::vector<int> var_of;    // new variable id (1-based) -> original id
  std::vector<int> clause_of; // new clause id -> original id
};
Ball neighborhood(const FactorGraph& g, int v, double radius);

// Distance between two variables in the half-integer metric; -1 when
// disconnected. Used by tests and by preprocessing.
double variable_distance(const FactorGraph& g, int u, int v);

}  // namespace ksat
