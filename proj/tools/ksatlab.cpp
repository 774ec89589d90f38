// ksatlab: population dynamics, free-energy root finding, and the exact
// small-instance cluster laboratory behind them, as CLI subcommands.
// Machine-readable output goes to files/stdout; human summaries to stderr.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ksat/cluster_models.hpp"
#include "ksat/errors.hpp"
#include "ksat/factor_graph.hpp"
#include "ksat/free_energy.hpp"
#include "ksat/moments.hpp"
#include "ksat/popdyn.hpp"
#include "ksat/preprocess.hpp"
#include "ksat/tree_bp.hpp"

namespace {

constexpr const char* kVersion = "ksatlab 1.0";

struct SeedOption {
  std::string raw = "";
  uint64_t value = 0;

  void resolve() {
    if (raw.empty())
      throw CLI::ValidationError("--seed",
                                 "an explicit seed (or 'auto') is required");
    if (raw == "auto") {
      std::random_device rd;
      value = (static_cast<uint64_t>(rd()) << 32) ^ rd();
      std::cerr << "seed auto: chose " << value << "\n";
    } else {
      value = std::stoull(raw);
    }
  }
};

void add_seed(CLI::App* cmd, SeedOption* seed) {
  cmd->add_option("--seed", seed->raw, "RNG seed (u64) or 'auto'");
}

std::string config_header(const std::string& line) {
  return std::string(kVersion) + " " + line;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed on " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// Flat key=value config support: the pair "--config <file>" is replaced
// in place by "--key=value" arguments, so flags given after it override.
static std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; i++) {
    std::string tok = argv[i];
    if (tok == "--config" && i + 1 < argc) {
      std::ifstream in(argv[++i]);
      if (!in) throw std::runtime_error(std::string("cannot open config file ") + argv[i]);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("config line without '=': " + line);
        args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
      }
      continue;
    }
    args.push_back(tok);
  }
  return args;
}

int main(int argc, char** argv) {
  CLI::App app{"random k-SAT one-step-RSB threshold laboratory"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // ---- popdyn ----
  auto* popdyn = app.add_subcommand("popdyn", "evolve the distributional recursion");
  int pd_k = 3;
  double pd_alpha = 4.0;
  uint64_t pd_n = 100000;
  int pd_iters = 20, pd_workers = 0;
  std::string pd_out, pd_in, pd_tail;
  SeedOption pd_seed;
  popdyn->add_option("--k", pd_k, "clause width");
  popdyn->add_option("--alpha", pd_alpha, "clause density");
  popdyn->add_option("--pop", pd_n, "population size");
  popdyn->add_option("--iters", pd_iters, "iterations");
  popdyn->add_option("--workers", pd_workers, "worker threads (0 = auto)");
  popdyn->add_option("--in", pd_in, "warm-start snapshot");
  popdyn->add_option("--out", pd_out, "output snapshot path")->required();
  popdyn->add_option("--tail", pd_tail, "tail-diagnostics CSV path");
  add_seed(popdyn, &pd_seed);

  // ---- phi ----
  auto* phi = app.add_subcommand("phi", "Monte-Carlo free energy at one density");
  int ph_k = 3, ph_iters = 20, ph_workers = 0;
  double ph_alpha = 4.0;
  uint64_t ph_n = 100000;
  int64_t ph_samples = 100000;
  std::string ph_snapshot;
  SeedOption ph_seed;
  phi->add_option("--k", ph_k, "clause width");
  phi->add_option("--alpha", ph_alpha, "clause density");
  phi->add_option("--snapshot", ph_snapshot, "population snapshot to reuse");
  phi->add_option("--pop", ph_n, "population size (when no snapshot)");
  phi->add_option("--iters", ph_iters, "burn-in iterations (when no snapshot)");
  phi->add_option("--samples", ph_samples, "integrand samples");
  phi->add_option("--workers", ph_workers, "worker threads");
  add_seed(phi, &ph_seed);

  // ---- threshold ----
  auto* thr = app.add_subcommand("threshold", "bisection for the free-energy root");
  ksat::ThresholdConfig tc;
  std::string thr_audit;
  SeedOption thr_seed;
  thr->add_option("--k", tc.k, "clause width");
  thr->add_option("--pop", tc.pop_size, "population size for estimates");
  thr->add_option("--burn-pop", tc.burn_pop, "population size for burn-in");
  thr->add_option("--tol", tc.tol, "bisection tolerance on alpha");
  thr->add_option("--samples", tc.samples, "initial Phi sample budget");
  thr->add_option("--min-iters", tc.min_iters, "minimum burn-in sweeps");
  thr->add_option("--max-iters", tc.max_iters, "maximum burn-in sweeps");
  thr->add_option("--workers", tc.workers, "worker threads");
  thr->add_option("--audit", thr_audit, "audit-trail CSV path");
  add_seed(thr, &thr_seed);

  // ---- moments ----
  auto* mom = app.add_subcommand("moments", "closed-form moment exponent curves");
  int mo_k = 6, mo_grid = 1001;
  double mo_alpha = 20.0;
  std::string mo_curve = "phi", mo_out;
  mom->add_option("--k", mo_k, "clause width");
  mom->add_option("--alpha", mo_alpha, "clause density");
  mom->add_option("--curve", mo_curve,
                  "phi | psi | phi_minus_2phi1 | psi_minus_2psi1");
  mom->add_option("--grid", mo_grid, "grid points on [0,1]");
  mom->add_option("--out", mo_out, "CSV path (default stdout)");

  // ---- clusters ----
  auto* clu = app.add_subcommand("clusters", "exact cluster census of an instance");
  std::string cl_dimacs, cl_id = "instance";
  clu->add_option("--dimacs", cl_dimacs, "DIMACS CNF path")->required();
  clu->add_option("--id", cl_id, "instance id for the CSV row");

  // ---- treebp ----
  auto* tb = app.add_subcommand("treebp", "exact BP on a tree fixture");
  std::string tb_tree, tb_out;
  tb->add_option("--tree", tb_tree, "tree fixture path")->required();
  tb->add_option("--out", tb_out, "edge-marginal CSV path (default stdout)");

  // ---- bsp ----
  auto* bs = app.add_subcommand("bsp", "bootstrap-percolation preprocessing");
  std::string bs_dimacs, bs_trigger_file, bs_out, bs_mode = "improper";
  double bs_radius = 2.0;
  int bs_n = 1000, bs_k = 3;
  double bs_alpha = 0.0;
  uint64_t bs_label_seed = 1;
  SeedOption bs_seed;
  bs->add_option("--dimacs", bs_dimacs, "instance path (else random)");
  bs->add_option("--n", bs_n, "variables for a random instance");
  bs->add_option("--k", bs_k, "clause width for a random instance");
  bs->add_option("--alpha", bs_alpha, "density for a random instance");
  bs->add_option("--radius", bs_radius, "removal ball radius R");
  bs->add_option("--trigger", bs_mode, "improper | file");
  bs->add_option("--trigger-file", bs_trigger_file, "one variable id per line");
  bs->add_option("--label-seed", bs_label_seed, "seed for variable labels");
  bs->add_option("--out", bs_out, "removal-log CSV path (default stdout)");
  add_seed(bs, &bs_seed);

  // ---- interp ----
  auto* ip = app.add_subcommand("interp", "interpolation upper bound estimate");
  ksat::InterpConfig ic;
  uint64_t ip_n = 100000;
  int ip_iters = 20;
  std::string ip_snapshot;
  SeedOption ip_seed;
  ip->add_option("--k", ic.k, "clause width");
  ip->add_option("--alpha", ic.alpha, "clause density");
  ip->add_option("--beta", ic.beta, "inverse temperature");
  ip->add_option("--m", ic.m, "replica parameter in (0,1)");
  ip->add_option("--outer", ic.outer, "outer replicates");
  ip->add_option("--inner", ic.inner, "inner samples");
  ip->add_option("--snapshot", ip_snapshot, "population snapshot to reuse");
  ip->add_option("--pop", ip_n, "population size (when no snapshot)");
  ip->add_option("--iters", ip_iters, "burn-in iterations (when no snapshot)");
  ip->add_option("--workers", ic.workers, "worker threads");
  add_seed(ip, &ip_seed);

  try {
    auto args = splice_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (popdyn->parsed()) {
      pd_seed.resolve();
      ksat::Population pop;
      if (!pd_in.empty()) {
        pop = ksat::snapshot_load(pd_in);
        pop.alpha = pd_alpha;
      } else {
        pop = ksat::population_delta_half(pd_k, pd_alpha, pd_n);
      }
      ksat::EvolveOptions eo;
      eo.workers = pd_workers;
      ksat::Population out = pop;
      double last_w1 = 0.0;
      if (pd_iters > 0) {
        ksat::Population prev =
            pd_iters > 1 ? ksat::evolve(pop, pd_iters - 1, pd_seed.value, eo)
                         : pop;
        out = ksat::evolve(prev, 1, pd_seed.value, eo);
        last_w1 = ksat::wasserstein1(prev, out);
      }
      ksat::snapshot_save(out, pd_out);
      std::cerr << "popdyn: k=" << out.k << " alpha=" << out.alpha
                << " iter=" << out.iter << " N=" << out.size()
                << " lastW1=" << last_w1 << " clamps=" << out.clamp_count
                << "\n";
      if (!pd_tail.empty()) {
        auto rep = ksat::tail_diagnostics(out, out.k);
        std::ostringstream csv;
        csv << "# " << config_header("popdyn tail") << " k=" << out.k
            << " alpha=" << fmt17(out.alpha) << " iter=" << out.iter
            << " seed=" << pd_seed.value << " N=" << out.size() << "\n";
        csv << "s,frac_low,frac_logit,envelope,low_flag,logit_flag\n";
        for (const auto& e : rep.entries)
          csv << fmt17(e.s) << "," << fmt17(e.frac_low) << ","
              << fmt17(e.frac_logit) << "," << fmt17(e.envelope) << ","
              << e.low_flag << "," << e.logit_flag << "\n";
        write_file(pd_tail, csv.str());
      }
      return 0;
    }

    if (phi->parsed()) {
      ph_seed.resolve();
      ksat::Population pop;
      if (!ph_snapshot.empty()) {
        pop = ksat::snapshot_load(ph_snapshot);
      } else {
        pop = ksat::population_delta_half(ph_k, ph_alpha, ph_n);
        ksat::EvolveOptions eo;
        eo.workers = ph_workers;
        pop = ksat::evolve(pop, ph_iters, ph_seed.value, eo);
      }
      auto est = ksat::phi_estimate(pop, ph_alpha, ph_samples, ph_seed.value,
                                    ph_workers);
      std::cout << "{\"alpha\":" << fmt17(est.alpha)
                << ",\"phi_mean\":" << fmt17(est.mean)
                << ",\"phi_stderr\":" << fmt17(est.stderr_)
                << ",\"samples\":" << est.samples
                << ",\"clamps\":" << est.clamp_count
                << ",\"seed\":" << ph_seed.value << "}\n";
      std::cerr << "phi: mean " << est.mean << " +- " << est.stderr_ << "\n";
      return 0;
    }

    if (thr->parsed()) {
      thr_seed.resolve();
      tc.seed = thr_seed.value;
      auto res = ksat::find_threshold(tc);
      if (!thr_audit.empty()) {
        std::ostringstream csv;
        csv << "# " << config_header("threshold") << " k=" << tc.k
            << " pop=" << tc.pop_size << " burn_pop=" << tc.burn_pop
            << " tol=" << fmt17(tc.tol) << " samples=" << tc.samples
            << " seed=" << tc.seed << "\n";
        csv << ksat::threshold_audit_csv(res, tc);
        write_file(thr_audit, csv.str());
      }
      if (!res.bracket_ok) {
        std::cerr << "threshold: " << res.failure << "\n";
        for (const auto& p : res.probes)
          std::cerr << "  probe alpha=" << p.alpha << " phi=" << p.phi_mean
                    << " +- " << p.phi_stderr << "\n";
        return 3;
      }
      std::cout << "{\"alpha_star\":" << fmt17(res.alpha_star)
                << ",\"probes\":" << res.probes.size()
                << ",\"seed\":" << tc.seed << "}\n";
      std::cerr << "threshold: alpha_star = " << res.alpha_star << " ("
                << res.probes.size() << " probes)\n";
      return 0;
    }

    if (mom->parsed()) {
      auto curve = ksat::sample_curve(mo_curve, mo_k, mo_alpha, mo_grid);
      std::string header = config_header("moments") + " curve=" + mo_curve +
                           " k=" + std::to_string(mo_k) +
                           " alpha=" + fmt17(mo_alpha) +
                           " grid=" + std::to_string(mo_grid);
      std::string body = ksat::curve_csv(curve, header);
      if (mo_out.empty())
        std::cout << body;
      else
        write_file(mo_out, body);
      // qualitative shape flags: interior local maxima of the curve
      for (size_t i = 1; i + 1 < curve.values.size(); i++) {
        if (curve.values[i] > curve.values[i - 1] &&
            curve.values[i] >= curve.values[i + 1])
          std::cerr << "local max near z=" << curve.grid[i]
                    << " value=" << curve.values[i] << "\n";
      }
      return 0;
    }

    if (clu->parsed()) {
      auto g = ksat::parse_dimacs(read_file(cl_dimacs));
      auto row = ksat::census(cl_id, g);
      std::cout << ksat::census_csv_header() << "\n"
                << ksat::census_csv_row(row) << "\n";
      // surjectivity defect: frozen configurations that are not coarsen
      // images of any cluster
      auto sols = ksat::enumerate_solutions(g);
      auto parts = ksat::clusters(sols, g.n());
      std::set<std::vector<ksat::Spin>> images;
      for (const auto& block : parts.blocks)
        images.insert(ksat::coarsen_mask(block.front(), g).value);
      std::cerr << "clusters: " << row.clusters << " clusters, " << row.frozen
                << " frozen configs, coarsen images " << images.size()
                << " (defect " << row.frozen - (int64_t)images.size() << ")\n";
      return 0;
    }

    if (tb->parsed()) {
      auto fixture = ksat::parse_tree_fixture(read_file(tb_tree));
      auto ms = ksat::solve_tree_bp(fixture.tree, fixture.weights);
      auto off = ksat::tree_edge_offsets(fixture.tree);
      std::ostringstream csv;
      csv << "# " << config_header("treebp") << " tree=" << tb_tree << "\n";
      csv << "clause,var,pi_r,pi_y,pi_g,pi_b,log_zbar\n";
      for (int c = 0; c < fixture.tree.clause_count(); c++) {
        for (int slot = 0;
             slot < 1 + (int)fixture.tree.clauses[c].children.size(); slot++) {
          int e = off[c] + slot;
          int v = slot == 0 ? fixture.tree.clauses[c].parent
                            : fixture.tree.clauses[c].children[slot - 1];
          auto pi = ksat::edge_marginal(ms.q_var[e], ms.q_cls[e]);
          csv << c + 1 << "," << v + 1 << "," << fmt17(pi[0]) << ","
              << fmt17(pi[1]) << "," << fmt17(pi[2]) << "," << fmt17(pi[3])
              << "," << fmt17(ms.log_zbar_edge[e]) << "\n";
        }
      }
      if (tb_out.empty())
        std::cout << csv.str();
      else
        write_file(tb_out, csv.str());
      return 0;
    }

    if (bs->parsed()) {
      ksat::FactorGraph g;
      uint64_t seed = 0;
      if (!bs_dimacs.empty()) {
        g = ksat::parse_dimacs(read_file(bs_dimacs));
      } else {
        bs_seed.resolve();
        seed = bs_seed.value;
        ksat::InstanceParams ipar;
        ipar.n = bs_n;
        ipar.k = bs_k;
        ipar.alpha = bs_alpha > 0 ? bs_alpha : 0.5 * std::pow(2.0, bs_k);
        ipar.mode = ksat::InstanceMode::poisson;
        ipar.seed = seed;
        g = ksat::generate_instance(ipar);
      }
      std::vector<int> trigger;
      if (bs_mode == "file") {
        std::istringstream in(read_file(bs_trigger_file));
        int v;
        while (in >> v) trigger.push_back(v);
      } else if (bs_mode == "improper") {
        auto labels = ksat::uniform_labels(g.n(), bs_label_seed);
        for (int v = 1; v <= g.n(); v++) {
          bool improper = false;
          for (const auto& occ : g.adj(v)) {
            auto st = ksat::simple_type(g, occ.clause, occ.slot, bs_radius, labels);
            if (!st.proper) {
              improper = true;
              break;
            }
          }
          if (improper) trigger.push_back(v);
        }
      } else {
        throw CLI::ValidationError("--trigger", "must be 'improper' or 'file'");
      }
      auto res = ksat::bsp_prime(trigger, g, bs_radius);
      std::string header = config_header("bsp") + " n=" + std::to_string(g.n()) +
                           " m=" + std::to_string(g.m()) +
                           " radius=" + fmt17(bs_radius) +
                           " trigger=" + bs_mode +
                           " seed=" + std::to_string(seed);
      std::string body = ksat::bsp_prime_log_csv(res, header);
      if (bs_out.empty())
        std::cout << body;
      else
        write_file(bs_out, body);
      std::cerr << "bsp: removed " << res.removed.size() << "/" << g.n()
                << " variables in " << res.rounds << " rounds\n";
      return 0;
    }

    if (ip->parsed()) {
      ip_seed.resolve();
      ic.seed = ip_seed.value;
      ksat::Population pop;
      if (!ip_snapshot.empty()) {
        pop = ksat::snapshot_load(ip_snapshot);
      } else {
        pop = ksat::population_delta_half(ic.k, ic.alpha, ip_n);
        ksat::EvolveOptions eo;
        eo.workers = ic.workers;
        pop = ksat::evolve(pop, ip_iters, ic.seed, eo);
      }
      auto est = ksat::interp_bound(ic, pop);
      std::cout << "{\"phi1_bound\":" << fmt17(est.mean)
                << ",\"stderr\":" << fmt17(est.stderr_)
                << ",\"outer\":" << est.outer << ",\"beta\":" << fmt17(ic.beta)
                << ",\"m\":" << fmt17(ic.m) << ",\"seed\":" << ic.seed << "}\n";
      std::cerr << "interp: Phi_1 = " << est.mean << " +- " << est.stderr_
                << "\n";
      return 0;
    }
  } catch (const ksat::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
