#include "ksat/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ksat {

FactorGraph::FactorGraph(int n, int k, std::vector<std::vector<Lit>> clauses)
    : n_(n), k_(k), clauses_(std::move(clauses)) {
  if (n < 0 || k < 0) throw std::invalid_argument("FactorGraph: bad sizes");
  adj_.resize(n_ + 1);
  for (int a = 0; a < static_cast<int>(clauses_.size()); a++) {
    for (int j = 0; j < static_cast<int>(clauses_[a].size()); j++) {
      const Lit& l = clauses_[a][j];
      if (l.var < 1 || l.var > n_)
        throw std::invalid_argument("FactorGraph: variable out of range");
      adj_[l.var].push_back({a, j});
    }
  }
}

FactorGraph generate_instance(const InstanceParams& p) {
  if (p.n < 1) throw std::invalid_argument("generate_instance: n >= 1 required");
  if (p.k < 2) throw std::invalid_argument("generate_instance: k >= 2 required");
  int m;
  if (p.mode == InstanceMode::fixed_m) {
    if (p.m < 0)
      throw std::invalid_argument("generate_instance: fixed_m mode requires m");
    m = p.m;
  } else {
    if (!(p.alpha > 0))
      throw std::invalid_argument("generate_instance: alpha > 0 required");
    Rng r = Rng::stream(p.seed, {0x6d});
    m = static_cast<int>(r.poisson(p.alpha * p.n));
  }
  std::vector<std::vector<Lit>> cls(m);
  Rng r = Rng::stream(p.seed, {0xc1});
  for (int a = 0; a < m; a++) {
    cls[a].resize(p.k);
    for (int j = 0; j < p.k; j++) {
      uint64_t raw = r.next();
      int var = static_cast<int>(Rng::map_below(raw, p.n)) + 1;
      int8_t sign = (raw & 1) ? int8_t(-1) : int8_t(1);
      cls[a][j] = Lit{var, sign};
    }
  }
  return FactorGraph(p.n, p.k, std::move(cls));
}

FactorTree sample_pgw_tree(double alpha, int k, double depth, uint64_t seed) {
  if (!(alpha >= 0) || k < 2)
    throw std::invalid_argument("sample_pgw_tree: bad parameters");
  double d2 = depth * 2.0;
  if (depth < 0 || d2 != std::floor(d2))
    throw std::invalid_argument("sample_pgw_tree: depth must be a multiple of 1/2");
  int half_depth = static_cast<int>(d2);

  FactorTree t;
  Rng rng = Rng::stream(seed, {0x97});
  t.root_edge_sign = rng.sign();
  t.vars.push_back({});
  // BFS frontier of (variable id, depth in half-edges)
  std::deque<std::pair<int, int>> frontier;
  frontier.push_back({0, 0});
  while (!frontier.empty()) {
    auto [v, dv] = frontier.front();
    frontier.pop_front();
    if (dv >= half_depth) {
      t.vars[v].boundary = true;
      continue;
    }
    int64_t deg = rng.poisson(alpha * k);
    for (int64_t i = 0; i < deg; i++) {
      int c = t.clause_count();
      t.clauses.push_back({});
      t.clauses[c].parent = v;
      t.clauses[c].parent_sign = rng.sign();
      t.vars[v].children.push_back(c);
      if (dv + 2 > half_depth) continue;  // clause at the cut: no children
      for (int j = 0; j < k - 1; j++) {
        int u = t.var_count();
        t.vars.push_back({});
        t.vars[u].parent = c;
        t.clauses[c].children.push_back(u);
        t.clauses[c].child_signs.push_back(rng.sign());
        frontier.push_back({u, dv + 2});
      }
    }
  }
  return t;
}

FactorGraph FactorTree::to_graph() const {
  std::vector<std::vector<Lit>> cls(clauses.size());
  for (size_t c = 0; c < clauses.size(); c++) {
    cls[c].push_back(Lit{clauses[c].parent + 1, clauses[c].parent_sign});
    for (size_t j = 0; j < clauses[c].children.size(); j++)
      cls[c].push_back(Lit{clauses[c].children[j] + 1, clauses[c].child_signs[j]});
  }
  int k = 0;
  for (auto& cl : cls) k = std::max<int>(k, cl.size());
  return FactorGraph(var_count(), k, std::move(cls));
}

FactorGraph parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int n = -1, m = -1, k = -1;
  std::vector<std::vector<Lit>> clauses;
  std::vector<Lit> cur;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("dimacs line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, cnf;
      if (!(ls >> p >> cnf >> n >> m) || cnf != "cnf")
        fail("malformed problem line");
      if (n < 0 || m < 0) fail("negative sizes");
      continue;
    }
    if (n < 0) fail("clause before problem line");
    std::istringstream ls(line);
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (cur.empty()) fail("empty clause");
        if (k < 0) k = static_cast<int>(cur.size());
        if (static_cast<int>(cur.size()) != k)
          fail("clause width " + std::to_string(cur.size()) +
               " differs from established k=" + std::to_string(k));
        clauses.push_back(cur);
        cur.clear();
      } else {
        long v = lit < 0 ? -lit : lit;
        if (v > n) fail("variable out of range");
        cur.push_back(Lit{static_cast<int>(v), lit < 0 ? int8_t(-1) : int8_t(1)});
      }
    }
    if (!ls.eof()) fail("unparsable token");
  }
  if (!cur.empty()) fail("unterminated clause");
  if (n < 0) throw std::runtime_error("dimacs: missing problem line");
  if (static_cast<int>(clauses.size()) != m)
    throw std::runtime_error("dimacs: clause count " +
                             std::to_string(clauses.size()) +
                             " does not match header m=" + std::to_string(m));
  if (k < 0) k = 0;
  return FactorGraph(n, k, std::move(clauses));
}

std::string emit_dimacs(const FactorGraph& g, const std::string& comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "c " << comment << "\n";
  out << "p cnf " << g.n() << " " << g.m() << "\n";
  for (int a = 0; a < g.m(); a++) {
    for (const Lit& l : g.clause(a))
      out << (l.sign < 0 ? -l.var : l.var) << " ";
    out << "0\n";
  }
  return out.str();
}

std::string instance_snapshot_comment(const InstanceParams& p) {
  std::ostringstream out;
  out << "seed=" << p.seed;
  out.precision(17);
  out << " alpha=" << p.alpha
      << " mode=" << (p.mode == InstanceMode::poisson ? "poisson" : "fixed_m");
  return out.str();
}

namespace {

// BFS over the bipartite graph in half-edge steps. Vertex encoding:
// variables are v (1-based), clauses are -(a+1).
struct BfsResult {
  std::map<int, int> dist;  // encoded vertex -> distance in half-edges
};

BfsResult ball_bfs(const FactorGraph& g, int root, int max_half) {
  BfsResult res;
  std::deque<int> queue;
  res.dist[root] = 0;
  queue.push_back(root);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    int d = res.dist[x];
    if (d >= max_half) continue;
    if (x > 0) {
      for (const auto& occ : g.adj(x)) {
        int enc = -(occ.clause + 1);
        if (!res.dist.count(enc)) {
          res.dist[enc] = d + 1;
          queue.push_back(enc);
        }
      }
    } else {
      int a = -x - 1;
      for (const Lit& l : g.clause(a)) {
        if (!res.dist.count(l.var)) {
          res.dist[l.var] = d + 1;
          queue.push_back(l.var);
        }
      }
    }
  }
  return res;
}

}  // namespace

Ball neighborhood(const FactorGraph& g, int v, double radius) {
  if (v < 1 || v > g.n())
    throw std::invalid_argument("neighborhood: variable out of range");
  double r2 = radius * 2.0;
  if (radius < 0 || r2 != std::floor(r2))
    throw std::invalid_argument("neighborhood: radius must be a multiple of 1/2");
  BfsResult bfs = ball_bfs(g, v, static_cast<int>(r2));

  Ball ball;
  std::map<int, int> var_new;  // original -> new (1-based)
  for (const auto& [enc, d] : bfs.dist) {
    if (enc > 0) {
      int id = static_cast<int>(var_new.size()) + 1;
      var_new[enc] = id;
      ball.var_of.push_back(enc);
    }
  }
  std::vector<std::vector<Lit>> cls;
  int edges = 0;
  for (const auto& [enc, d] : bfs.dist) {
    if (enc > 0) continue;
    int a = -enc - 1;
    std::vector<Lit> c;
    for (const Lit& l : g.clause(a)) {
      auto it = var_new.find(l.var);
      if (it != var_new.end()) c.push_back(Lit{it->second, l.sign});
    }
    edges += static_cast<int>(c.size());
    cls.push_back(std::move(c));
    ball.clause_of.push_back(a);
  }
  int vertices = static_cast<int>(var_new.size() + cls.size());
  ball.cyclic = edges > vertices - 1;
  ball.graph = FactorGraph(static_cast<int>(var_new.size()), g.k(), std::move(cls));
  ball.root = var_new.at(v);
  // prepend dummy so var_of is 1-based like variables
  ball.var_of.insert(ball.var_of.begin(), 0);
  return ball;
}

double variable_distance(const FactorGraph& g, int u, int v) {
  if (u == v) return 0.0;
  BfsResult bfs = ball_bfs(g, u, 2 * (g.n() + g.m() + 1));
  auto it = bfs.dist.find(v);
  if (it == bfs.dist.end()) return -1.0;
  return it->second / 2.0;
}

}  // namespace ksat
