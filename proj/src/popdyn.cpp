#include "ksat/popdyn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ksat/parallel.hpp"

namespace ksat {

namespace {

constexpr double kEtaMax = 1.0 - 0x1.0p-53;
constexpr uint64_t kTagEvolve = 0xE0;

// substream branches under the per-sample key
constexpr uint64_t kBranchDegrees = 1;
constexpr uint64_t kBranchEtaPlus = 2;
constexpr uint64_t kBranchEtaMinus = 3;
constexpr uint64_t kBranchIncrement = 4;

void check_alpha(int k, double alpha) {
  if (k < 2) throw std::invalid_argument("popdyn: k >= 2 required");
  if (!(alpha >= 0.0) || alpha > std::pow(2.0, k + 2))
    throw std::invalid_argument("popdyn: alpha outside [0, 2^(k+2)]");
}

}  // namespace

Population population_constant(int k, double alpha, size_t n, double value) {
  check_alpha(k, alpha);
  if (n < 1) throw std::invalid_argument("population: size >= 1 required");
  if (!(value >= 0.0) || value > kEtaMax)
    throw std::invalid_argument("population: value outside [0, 1)");
  Population p;
  p.k = k;
  p.alpha = alpha;
  p.samples.assign(n, value);
  return p;
}

Population population_delta_half(int k, double alpha, size_t n) {
  return population_constant(k, alpha, n, 0.5);
}

double recursion_sample(const RecursionDraw& draw) {
  if (draw.d_plus != static_cast<int64_t>(draw.eta_plus.size()) ||
      draw.d_minus != static_cast<int64_t>(draw.eta_minus.size()))
    throw std::invalid_argument("recursion_sample: degree/array mismatch");
  auto side = [](const std::vector<std::vector<double>>& rows) {
    double prod = 1.0;
    for (const auto& row : rows) {
      double u = 1.0;
      for (double e : row) {
        if (!(e >= 0.0) || e >= 1.0)
          throw std::invalid_argument("recursion_sample: eta outside [0, 1)");
        u *= e;
      }
      prod *= 1.0 - u;
    }
    return prod;
  };
  double pp = side(draw.eta_plus);
  double pm = side(draw.eta_minus);
  double r = (1.0 - pm) * pp / (pp + pm - pp * pm);
  return std::min(r, kEtaMax);
}

namespace {

// Product over d clauses of (1 - prod of k-1 population picks), with the
// index of pick (c, j) read at stream position c*(k-1)+j so that prefixes
// are shared across coupled clause counts.
inline double side_product(const double* prev, size_t n, const Rng& stream,
                           int64_t d, int k) {
  double prod = 1.0;
  uint64_t ctr = 0;
  const int km1 = k - 1;
  for (int64_t c = 0; c < d; c++) {
    double u0 = 1.0, u1 = 1.0;
    int j = 0;
    for (; j + 1 < km1; j += 2) {
      size_t i0 = Rng::map_below(stream.at(ctr + j), n);
      size_t i1 = Rng::map_below(stream.at(ctr + j + 1), n);
      u0 *= prev[i0];
      u1 *= prev[i1];
    }
    if (j < km1) u0 *= prev[Rng::map_below(stream.at(ctr + j), n)];
    ctr += km1;
    prod *= 1.0 - u0 * u1;
    if (prod < 1e-290) prod = 1e-290;  // ratio beyond this is noise
  }
  return prod;
}

struct StepParams {
  int k;
  double lam_base;  // alpha_base * k / 2
  double lam_inc;   // (alpha - alpha_base) * k / 2, 0 when uncoupled
};

inline double step_sample(const double* prev, size_t n, uint64_t iter_key,
                          size_t i, const StepParams& sp,
                          std::atomic<uint64_t>* clamps) {
  uint64_t key_i = Rng::derive(iter_key, i);
  Rng rng_d(Rng::derive(key_i, kBranchDegrees));
  int64_t dp = rng_d.poisson(sp.lam_base);
  int64_t dm = rng_d.poisson(sp.lam_base);
  if (sp.lam_inc > 0) {
    Rng rng_inc(Rng::derive(key_i, kBranchIncrement));
    dp += poisson_inverse(sp.lam_inc, rng_inc.unit_at(0));
    dm += poisson_inverse(sp.lam_inc, rng_inc.unit_at(1));
  }
  Rng ep(Rng::derive(key_i, kBranchEtaPlus));
  Rng em(Rng::derive(key_i, kBranchEtaMinus));
  double pp = side_product(prev, n, ep, dp, sp.k);
  double pm = side_product(prev, n, em, dm, sp.k);
  double r = (1.0 - pm) * pp / (pp + pm - pp * pm);
  if (!(r <= kEtaMax)) {
    clamps->fetch_add(1, std::memory_order_relaxed);
    r = kEtaMax;
  }
  return r;
}

}  // namespace

Population evolve(const Population& pop, int iters, uint64_t seed,
                  const EvolveOptions& opt) {
  check_alpha(pop.k, pop.alpha);
  if (pop.samples.empty()) throw std::invalid_argument("evolve: empty population");
  double alpha_base = opt.alpha_base < 0 ? pop.alpha : opt.alpha_base;
  if (alpha_base > pop.alpha)
    throw std::invalid_argument("evolve: alpha_base must not exceed alpha");
  StepParams sp;
  sp.k = pop.k;
  sp.lam_base = alpha_base * pop.k / 2.0;
  sp.lam_inc = (pop.alpha - alpha_base) * pop.k / 2.0;

  Population cur = pop;
  cur.seed = seed;
  for (int t = 0; t < iters; t++) {
    uint32_t iteration = cur.iter + 1;
    size_t out_n = (t == 0 && opt.resize > 0) ? opt.resize : cur.samples.size();
    std::vector<double> next(out_n);
    uint64_t iter_key =
        Rng::derive(Rng::derive(Rng::stream(seed, {kTagEvolve}).key(), iteration), 0);
    std::atomic<uint64_t> clamps{0};
    const double* prev = cur.samples.data();
    const size_t prev_n = cur.samples.size();
    parallel_for(out_n, opt.workers, [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; i++)
        next[i] = step_sample(prev, prev_n, iter_key, i, sp, &clamps);
    });
    cur.samples = std::move(next);
    cur.iter = iteration;
    cur.clamp_count = clamps.load();
  }
  return cur;
}

std::pair<Population, Population> coupled_evolve(const Population& pop_low,
                                                 const Population& pop_high,
                                                 double alpha_low,
                                                 double alpha_high, int iters,
                                                 uint64_t seed, int workers) {
  if (alpha_low > alpha_high)
    throw std::invalid_argument("coupled_evolve: alpha_low > alpha_high");
  if (pop_low.size() != pop_high.size())
    throw std::invalid_argument("coupled_evolve: size mismatch");
  if (pop_low.k != pop_high.k)
    throw std::invalid_argument("coupled_evolve: k mismatch");
  check_alpha(pop_low.k, alpha_low);
  check_alpha(pop_high.k, alpha_high);

  Population low = pop_low, high = pop_high;
  low.alpha = alpha_low;
  high.alpha = alpha_high;
  low.seed = high.seed = seed;
  const int k = low.k;
  StepParams sp_low{k, alpha_low * k / 2.0, 0.0};
  const double lam_inc = (alpha_high - alpha_low) * k / 2.0;

  for (int t = 0; t < iters; t++) {
    uint32_t iteration = low.iter + 1;
    const size_t n = low.samples.size();
    std::vector<double> next_low(n), next_high(n);
    uint64_t iter_key =
        Rng::derive(Rng::derive(Rng::stream(seed, {kTagEvolve}).key(), iteration), 0);
    std::atomic<uint64_t> clamps_low{0}, clamps_high{0};
    const double* prev_low = low.samples.data();
    const double* prev_high = high.samples.data();
    parallel_for(n, workers, [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; i++) {
        uint64_t key_i = Rng::derive(iter_key, i);
        Rng rng_d(Rng::derive(key_i, kBranchDegrees));
        int64_t dp = rng_d.poisson(sp_low.lam_base);
        int64_t dm = rng_d.poisson(sp_low.lam_base);
        int64_t ddp = dp, ddm = dm;
        if (lam_inc > 0) {
          Rng rng_inc(Rng::derive(key_i, kBranchIncrement));
          ddp += poisson_inverse(lam_inc, rng_inc.unit_at(0));
          ddm += poisson_inverse(lam_inc, rng_inc.unit_at(1));
        }
        Rng ep(Rng::derive(key_i, kBranchEtaPlus));
        Rng em(Rng::derive(key_i, kBranchEtaMinus));
        {
          double pp = side_product(prev_low, n, ep, dp, k);
          double pm = side_product(prev_low, n, em, dm, k);
          double r = (1.0 - pm) * pp / (pp + pm - pp * pm);
          if (!(r <= kEtaMax)) {
            clamps_low.fetch_add(1, std::memory_order_relaxed);
            r = kEtaMax;
          }
          next_low[i] = r;
        }
        {
          double pp = side_product(prev_high, n, ep, ddp, k);
          double pm = side_product(prev_high, n, em, ddm, k);
          double r = (1.0 - pm) * pp / (pp + pm - pp * pm);
          if (!(r <= kEtaMax)) {
            clamps_high.fetch_add(1, std::memory_order_relaxed);
            r = kEtaMax;
          }
          next_high[i] = r;
        }
      }
    });
    low.samples = std::move(next_low);
    high.samples = std::move(next_high);
    low.iter = high.iter = iteration;
    low.clamp_count = clamps_low.load();
    high.clamp_count = clamps_high.load();
  }
  return {std::move(low), std::move(high)};
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1: empty population");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double s = 0;
    for (size_t i = 0; i < a.size(); i++) s += std::abs(a[i] - b[i]);
    return s / a.size();
  }
  // integral of |F_a^{-1}(u) - F_b^{-1}(u)| over piecewise-constant quantiles
  double s = 0;
  size_t i = 0, j = 0;
  double u = 0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double ua = (i + 1) / na, ub = (j + 1) / nb;
    double next = std::min(ua, ub);
    s += (next - u) * std::abs(a[i] - b[j]);
    u = next;
    if (ua <= next) i++;
    if (ub <= next) j++;
  }
  return s;
}

double wasserstein1(const Population& a, const Population& b) {
  return wasserstein1(a.samples, b.samples);
}

TailReport tail_diagnostics(const Population& pop, int k,
                            std::vector<double> grid, double slack) {
  const double s_min = std::pow(2.0, -k / 4.0);
  if (grid.empty()) {
    for (double s = s_min; s <= 4.0; s *= 1.5) grid.push_back(s);
  }
  TailReport rep;
  const double n = static_cast<double>(pop.size());
  const double allowance = slack / std::sqrt(n);
  std::vector<double> sorted = pop.samples;
  std::sort(sorted.begin(), sorted.end());
  for (double s : grid) {
    if (s < s_min) continue;
    TailReport::Entry e;
    e.s = s;
    e.envelope = std::exp(-s * std::pow(2.0, k / 4.0));
    // P(eta <= 1/2 - s)
    double lo = 0.5 - s;
    e.frac_low =
        (std::lower_bound(sorted.begin(), sorted.end(),
                          std::nextafter(lo, 1.0)) -
         sorted.begin()) /
        n;
    // P(log[eta/(1-eta)] >= s)  <=>  eta >= e^s / (1 + e^s)
    double hi = std::exp(s) / (1.0 + std::exp(s));
    e.frac_logit =
        (sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), hi)) / n;
    e.low_flag = e.frac_low > e.envelope + allowance;
    e.logit_flag = e.frac_logit > e.envelope + allowance;
    rep.flags += e.low_flag + e.logit_flag;
    rep.entries.push_back(e);
  }
  return rep;
}

std::string snapshot_string(const Population& pop) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", pop.alpha);
  out << "POPDYN v1 k=" << pop.k << " alpha=" << buf << " iter=" << pop.iter
      << " seed=" << pop.seed << " N=" << pop.size() << "\n";
  for (double s : pop.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s);
    out << buf << "\n";
  }
  return out.str();
}

void snapshot_save(const Population& pop, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot_save: cannot open " + path);
  out << snapshot_string(pop);
  if (!out) throw std::runtime_error("snapshot_save: write failed on " + path);
}

Population snapshot_parse(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("snapshot: empty file");
  Population pop;
  uint64_t n = 0;
  {
    std::istringstream hs(header);
    std::string magic, ver, kv;
    if (!(hs >> magic >> ver) || magic != "POPDYN" || ver != "v1")
      throw std::runtime_error("snapshot: bad magic or version");
    bool have_k = false, have_a = false, have_i = false, have_s = false,
         have_n = false;
    while (hs >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("snapshot: malformed header field " + kv);
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "k") {
        pop.k = std::stoi(val);
        have_k = true;
      } else if (key == "alpha") {
        pop.alpha = std::stod(val);
        have_a = true;
      } else if (key == "iter") {
        pop.iter = static_cast<uint32_t>(std::stoul(val));
        have_i = true;
      } else if (key == "seed") {
        pop.seed = std::stoull(val);
        have_s = true;
      } else if (key == "N") {
        n = std::stoull(val);
        have_n = true;
      } else {
        throw std::runtime_error("snapshot: unknown header field " + key);
      }
    }
    if (!(have_k && have_a && have_i && have_s && have_n))
      throw std::runtime_error("snapshot: incomplete header");
  }
  pop.samples.reserve(n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t pos = 0;
    double v = std::stod(line, &pos);
    if (pos != line.size())
      throw std::runtime_error("snapshot: trailing junk in sample line");
    if (!(v >= 0.0) || v >= 1.0)
      throw std::runtime_error("snapshot: sample outside [0, 1)");
    pop.samples.push_back(v);
  }
  if (pop.samples.size() != n)
    throw std::runtime_error("snapshot: expected " + std::to_string(n) +
                             " samples, found " +
                             std::to_string(pop.samples.size()));
  return pop;
}

Population snapshot_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot_load: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return snapshot_parse(ss.str());
}

}  // namespace ksat
