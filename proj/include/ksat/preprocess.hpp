#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksat/factor_graph.hpp"

namespace ksat {

// Bootstrap percolation: grow D by adding every variable with at least two
// distinct neighboring variables (hypergraph neighbors) already in D, until
// stable. Returns the closure, sorted.
std::vector<int> bsp(const std::vector<int>& d0, const FactorGraph& g);

// Iterated R-ball removal. Round 0 removes the balls of the given trigger
// set; afterwards the trigger set of round t is recomputed in the current
// graph as the variables whose (3R/10)-ball contains at least two clauses
// of degree k-1 or one clause of degree <= k-2. Terminates when the trigger
// set is empty.
struct BspPrimeRound {
  int round;
  int trigger_variable;
  int ball_size;        // variables in the ball at the time of the snapshot
  int clauses_removed;  // clauses in that ball
};

struct BspPrimeResult {
  std::vector<int> removed;  // sorted removed variables: BSP'(A; G)
  std::vector<bool> var_alive;     // 1-based
  std::vector<bool> clause_alive;  // 0-based
  std::vector<BspPrimeRound> log;
  int rounds = 0;
};

BspPrimeResult bsp_prime(const std::vector<int>& trigger, const FactorGraph& g,
                         double radius);

// CSV "round,trigger_variable,ball_size,clauses_removed"
std::string bsp_prime_log_csv(const BspPrimeResult& res,
                              const std::string& config_header);

// Canonical encoding of the edge-rooted ball (B_R(v), e). Equal codes iff
// the rooted, sign-, position- and label-preserving isomorphism exists.
struct SimpleType {
  std::string code;   // empty when cyclic
  bool acyclic = false;
  bool proper = false;  // acyclic and no repeated labels in the ball
  int j_root = 0;       // position j(v; a) of the rooted edge
};
SimpleType simple_type(const FactorGraph& g, int clause, int slot, double radius,
                       const std::vector<uint64_t>& labels);

// Uniform labels in [1, 2^64); deterministic in seed.
std::vector<uint64_t> uniform_labels(int n, uint64_t seed);

// Lemma-style bound on trees: |A| >= 1 + (|BSP(A;T)| - 1) / (2(k-1)).
// ok is vacuously true for empty A.
struct ForestBound {
  double lhs = 0, rhs = 0;
  bool ok = true;
  int64_t bsp_size = 0;
};
ForestBound spanning_forest_bound_check(const FactorGraph& tree,
                                        const std::vector<int>& a);

}  // namespace ksat
