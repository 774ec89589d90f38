#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksat/factor_graph.hpp"

namespace ksat {

// Spin conventions: +1, -1, and 0 for the free spin f.
using Spin = int8_t;
constexpr Spin kSpinF = 0;

// Frozen configuration: 1-based array over variables with entries +1/-1/0.
struct FrozenConfig {
  std::vector<Spin> value;
  explicit FrozenConfig(int n = 0) : value(n + 1, kSpinF) {}
  bool operator==(const FrozenConfig&) const = default;
};

// Warning configuration: per-edge pair (var->clause, clause->var).
// Edges are indexed clause-major: edge_id = clause_offset[a] + slot.
struct WarningConfig {
  std::vector<Spin> to_clause;  // +1/-1/0
  std::vector<Spin> to_var;     // +1/0 only
  bool operator==(const WarningConfig&) const = default;
};

enum Color : uint8_t { kR = 0, kY = 1, kG = 2, kB = 3 };

struct Coloring {
  std::vector<uint8_t> color;  // per edge, clause-major
  bool operator==(const Coloring&) const = default;
};

struct ClusterPartition {
  std::vector<std::vector<uint32_t>> blocks;  // sorted solution bitmasks
};

// Bitmask convention: bit (v-1) set means x_v = +.
uint32_t mask_of(const std::vector<Spin>& x);

// Exhaustive solution enumeration, sorted ascending. Budget n <= 26.
std::vector<uint32_t> enumerate_solutions(const FactorGraph& g);

// Hamming-1 connected components, deterministic block order (by smallest
// member).
ClusterPartition clusters(const std::vector<uint32_t>& solutions, int n);

// One step of the coarsening map: keep x_v where v is blocked, else f.
// Throws if the input has a violated clause (all literals strictly false).
std::vector<Spin> co_step(const std::vector<Spin>& x, const FactorGraph& g);
// co iterated to its fixed point.
FrozenConfig coarsen(const std::vector<Spin>& x, const FactorGraph& g);
FrozenConfig coarsen_mask(uint32_t solution, const FactorGraph& g);

// Minimal Hamming subcube label of a cluster: the common value where
// constant, f otherwise.
FrozenConfig cube(const std::vector<uint32_t>& cluster, int n);

struct ValidityWitness {
  bool valid = true;
  std::string reason;  // names the violating clause/variable when invalid
};
ValidityWitness is_valid_frozen(const FrozenConfig& x, const FactorGraph& g);

// Exhaustive enumeration of valid frozen configurations (3^n filter,
// n <= 14).
std::vector<FrozenConfig> enumerate_frozen(const FactorGraph& g);

// The three-way bijection.
WarningConfig frozen_to_wp(const FrozenConfig& x, const FactorGraph& g);
FrozenConfig wp_to_frozen(const WarningConfig& w, const FactorGraph& g);
Coloring wp_to_coloring(const WarningConfig& w, const FactorGraph& g);
WarningConfig coloring_to_wp(const Coloring& c, const FactorGraph& g);
FrozenConfig coloring_to_frozen(const Coloring& c, const FactorGraph& g);
Coloring frozen_to_coloring(const FrozenConfig& x, const FactorGraph& g);

// Factor predicates of the color model. clause_factor ignores signs.
bool clause_factor(const std::vector<uint8_t>& colors);
struct EvResult {
  bool valid = false;
  Spin ev = kSpinF;
};
EvResult variable_factor(const std::vector<uint8_t>& colors,
                         const std::vector<int8_t>& signs);
// ev of a single (color, sign) pair
Spin ev_of(uint8_t color, int8_t sign);

// Independent exhaustive enumerations over the edge state spaces
// (backtracking with local-factor pruning; results sorted).
std::vector<Coloring> enumerate_colorings(const FactorGraph& g);
std::vector<WarningConfig> enumerate_warnings(const FactorGraph& g);

// Fixtures.
// 2^(k-1) clauses (-z or s_1 u_1 or ... or s_{k-1} u_{k-1}) over all sign
// patterns; pins z to - in every solution. Variable 1 is z.
FactorGraph pinning_gadget(int k);
// The cycle construction exhibiting coarsen != cube at variable u.
// Returns the graph and the indices of u, v, w.
struct CycleGadget {
  FactorGraph graph;
  int u, v, w;
};
CycleGadget cycle_gadget(int k);

struct CensusRow {
  std::string instance_id;
  int n, m, k;
  int64_t solutions, clusters, frozen, warnings, colorings;
};
CensusRow census(const std::string& instance_id, const FactorGraph& g);
std::string census_csv_header();
std::string census_csv_row(const CensusRow& r);

}  // namespace ksat
