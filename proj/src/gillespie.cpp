#include "epinet/gillespie.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>

#include "epinet/errors.hpp"
#include "epinet/rng.hpp"

namespace epinet {

namespace {

// Complete-binary sum tree for O(log n) rate updates and selection. Parents
// are recomputed as exact sums of their children, so no drift accumulates.
class RateTree {
 public:
  explicit RateTree(int n) {
    leaves_ = 1;
    while (leaves_ < n) leaves_ <<= 1;
    tree_.assign(static_cast<std::size_t>(2 * leaves_), 0.0);
  }

  void set(int i, double rate) {
    std::size_t k = static_cast<std::size_t>(leaves_ + i);
    tree_[k] = rate;
    while (k > 1) {
      k >>= 1;
      tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }
  }

  double get(int i) const { return tree_[static_cast<std::size_t>(leaves_ + i)]; }
  double total() const { return tree_[1]; }

  // Leaf whose cumulative interval contains u in [0, total). Never descends
  // into an empty right subtree, so the returned leaf has a positive rate
  // whenever total() does.
  int select(double u) const {
    std::size_t k = 1;
    while (k < static_cast<std::size_t>(leaves_)) {
      k <<= 1;
      if (u >= tree_[k] && tree_[k + 1] > 0.0) {
        u -= tree_[k];
        ++k;
      }
    }
    return static_cast<int>(k - static_cast<std::size_t>(leaves_));
  }

 private:
  int leaves_;
  std::vector<double> tree_;
};

// One replica of the chain with per-node rate bookkeeping, O(degree) per
// event. Rates live in scaled time: cure/removal 1, infection tau per
// infected neighbor. Theorem-1 observables are maintained incrementally.
class Walker {
 public:
  Walker(Model model, const Graph& g, double tau)
      : model_(model), graph_(g), tau_(tau), tree_(g.num_nodes()),
        comp_(static_cast<std::size_t>(g.num_nodes()), Compartment::S),
        infected_nbrs_(static_cast<std::size_t>(g.num_nodes()), 0) {}

  void reset(std::span<const int> infected) {
    std::fill(comp_.begin(), comp_.end(), Compartment::S);
    std::fill(infected_nbrs_.begin(), infected_nbrs_.end(), 0);
    for (int v = 0; v < graph_.num_nodes(); ++v) tree_.set(v, 0.0);
    n_inf_ = n_rem_ = 0;
    cut_ = mixed_ = 0;
    for (int v : infected) {
      if (v < 0 || v >= graph_.num_nodes()) throw InvalidArgument("init node out of range");
      if (comp_[static_cast<std::size_t>(v)] == Compartment::I) {
        throw InvalidArgument("duplicate init node");
      }
      apply_infection(v);
    }
  }

  bool absorbed() const { return !(tree_.total() > 0.0); }

  // Time to the next event; +inf when absorbed. Draws one exponential.
  double sample_dt(Xoshiro256& rng) {
    const double total = tree_.total();
    if (!(total > 0.0)) return std::numeric_limits<double>::infinity();
    return rng.exponential() / total;
  }

  // Selects and applies the next event. Draws one uniform.
  void apply_event(Xoshiro256& rng) {
    const double total = tree_.total();
    const int v = tree_.select(rng.uniform() * total);
    if (comp_[static_cast<std::size_t>(v)] == Compartment::I) {
      apply_recovery(v);
      last_kind_ = model_ == Model::SIS ? EventKind::Cure : EventKind::Remove;
    } else {
      apply_infection(v);
      last_kind_ = EventKind::Infect;
    }
    last_node_ = v;
  }

  EventKind last_kind() const { return last_kind_; }
  int last_node() const { return last_node_; }

  int infected_count() const { return n_inf_; }
  int removed_count() const { return n_rem_; }
  long cut() const { return cut_; }
  long mixed() const { return mixed_; }
  Compartment compartment(int v) const { return comp_[static_cast<std::size_t>(v)]; }

  std::vector<int> infected_set() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_inf_));
    for (int v = 0; v < graph_.num_nodes(); ++v) {
      if (comp_[static_cast<std::size_t>(v)] == Compartment::I) out.push_back(v);
    }
    return out;
  }

 private:
  // v: S -> I. cut counts edges with exactly one infected endpoint; mixed
  // counts ordered adjacent pairs (infected, removed).
  void apply_infection(int v) {
    comp_[static_cast<std::size_t>(v)] = Compartment::I;
    ++n_inf_;
    tree_.set(v, 1.0);
    for (int u : graph_.neighbors(v)) {
      const Compartment cu = comp_[static_cast<std::size_t>(u)];
      ++infected_nbrs_[static_cast<std::size_t>(u)];
      if (cu == Compartment::I) {
        --cut_;  // edge went 1 -> 2 infected endpoints
      } else {
        ++cut_;  // 0 -> 1
      }
      if (cu == Compartment::S) {
        tree_.set(u, tau_ * infected_nbrs_[static_cast<std::size_t>(u)]);
      } else if (cu == Compartment::R) {
        ++mixed_;  // new pair (v in I, u in R)
      }
    }
  }

  // v: I -> S (SIS) or I -> R (SIR).
  void apply_recovery(int v) {
    const bool to_removed = model_ == Model::SIR;
    comp_[static_cast<std::size_t>(v)] = to_removed ? Compartment::R : Compartment::S;
    --n_inf_;
    if (to_removed) ++n_rem_;
    for (int u : graph_.neighbors(v)) {
      const Compartment cu = comp_[static_cast<std::size_t>(u)];
      --infected_nbrs_[static_cast<std::size_t>(u)];
      if (cu == Compartment::I) {
        ++cut_;  // edge went 2 -> 1 infected endpoints
        if (to_removed) ++mixed_;  // new pair (u in I, v in R)
      } else {
        --cut_;  // 1 -> 0
      }
      if (cu == Compartment::S) {
        tree_.set(u, tau_ * infected_nbrs_[static_cast<std::size_t>(u)]);
      } else if (cu == Compartment::R) {
        --mixed_;  // pair (v in I, u in R) disappears
      }
    }
    if (to_removed) {
      tree_.set(v, 0.0);
    } else {
      tree_.set(v, tau_ * infected_nbrs_[static_cast<std::size_t>(v)]);
    }
  }

  Model model_;
  const Graph& graph_;
  double tau_;
  RateTree tree_;
  std::vector<Compartment> comp_;
  std::vector<int> infected_nbrs_;
  int n_inf_ = 0;
  int n_rem_ = 0;
  long cut_ = 0;
  long mixed_ = 0;
  EventKind last_kind_ = EventKind::Infect;
  int last_node_ = -1;
};

}  // namespace

EventTrace simulate(Model model, const Graph& g, const EpidemicParams& p,
                    std::span<const int> init, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw InvalidArgument("simulate: horizon must be positive");
  EventTrace trace;
  trace.model = model;
  trace.seed = seed;
  trace.horizon = horizon;
  trace.init.assign(init.begin(), init.end());

  Walker walker(model, g, p.tau);
  walker.reset(init);
  Xoshiro256 rng(seed);
  double t = 0.0;
  while (true) {
    const double dt = walker.sample_dt(rng);
    if (!std::isfinite(dt)) break;
    t += dt;
    if (t > horizon) break;
    walker.apply_event(rng);
    trace.events.push_back({t, walker.last_node(), walker.last_kind()});
  }
  return trace;
}

namespace {

struct RunSamples {
  // [grid point] -> {zI, zR, cut, mixed, z*cut}.
  std::vector<std::array<double, 5>> at;
};

RunSamples run_one(Model model, const Graph& g, double tau, std::span<const int> init,
                   double horizon, std::span<const double> grid, std::uint64_t master_seed,
                   int run_index) {
  Walker walker(model, g, tau);
  walker.reset(init);
  Xoshiro256 rng = derive_stream(master_seed, static_cast<std::uint64_t>(run_index));

  const double n = static_cast<double>(g.num_nodes());
  RunSamples out;
  out.at.resize(grid.size());
  std::size_t next = 0;
  auto record = [&]() {
    const double z = walker.infected_count() / n;
    out.at[next] = {z, walker.removed_count() / n, static_cast<double>(walker.cut()),
                    static_cast<double>(walker.mixed()), z * walker.cut()};
    ++next;
  };

  double t = 0.0;
  while (next < grid.size()) {
    const double dt = walker.sample_dt(rng);
    const double t_next = t + dt;
    // Grid points strictly before the next event see the current state.
    while (next < grid.size() && grid[next] < t_next) record();
    if (next >= grid.size() || !std::isfinite(dt) || t_next > horizon) {
      // Absorbed chains keep their state forever.
      while (next < grid.size()) record();
      break;
    }
    walker.apply_event(rng);
    t = t_next;
  }
  return out;
}

}  // namespace

EnsembleStats ensemble(Model model, const Graph& g, const EpidemicParams& p,
                       std::span<const int> init, double horizon, int runs,
                       std::span<const double> grid, std::uint64_t master_seed, int threads) {
  if (runs < 2) throw InvalidArgument("ensemble: need at least 2 runs");
  for (double t : grid) {
    if (t < 0.0 || t > horizon) throw InvalidArgument("ensemble: grid must lie in [0, horizon]");
  }
  threads = std::clamp(threads, 1, runs);

  std::vector<RunSamples> samples(static_cast<std::size_t>(runs));
  auto work = [&](int first, int past) {
    for (int r = first; r < past; ++r) {
      samples[static_cast<std::size_t>(r)] =
          run_one(model, g, p.tau, init, horizon, grid, master_seed, r);
    }
  };
  if (threads == 1) {
    work(0, runs);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (runs + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int first = w * chunk;
      const int past = std::min(runs, first + chunk);
      if (first < past) pool.emplace_back(work, first, past);
    }
    for (auto& th : pool) th.join();
  }

  // Fixed-order reduction over run indices: identical for any thread count.
  EnsembleStats stats;
  stats.grid.assign(grid.begin(), grid.end());
  stats.rows.resize(grid.size());
  stats.runs = runs;
  stats.master_seed = master_seed;
  const double nr = static_cast<double>(runs);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::array<double, 5> sum{};
    std::array<double, 5> sumsq{};
    for (int r = 0; r < runs; ++r) {
      const auto& x = samples[static_cast<std::size_t>(r)].at[k];
      for (std::size_t o = 0; o < 5; ++o) {
        sum[o] += x[o];
        sumsq[o] += x[o] * x[o];
      }
    }
    std::array<double, 5> mean{};
    std::array<double, 5> se{};
    std::array<double, 5> var{};
    for (std::size_t o = 0; o < 5; ++o) {
      mean[o] = sum[o] / nr;
      var[o] = std::max(0.0, (sumsq[o] - nr * mean[o] * mean[o]) / (nr - 1.0));
      se[o] = std::sqrt(var[o] / nr);
    }
    EnsembleRow& row = stats.rows[k];
    row.mean_zI = mean[0];
    row.se_zI = se[0];
    row.var_zI = var[0];
    row.mean_zR = mean[1];
    row.se_zR = se[1];
    row.mean_cut = mean[2];
    row.se_cut = se[2];
    row.mean_mixed = mean[3];
    row.se_mixed = se[3];
    row.mean_zcut = mean[4];
    row.se_zcut = se[4];
  }
  return stats;
}

PeakResult peak_prevalence(std::span<const double> grid, std::span<const double> y) {
  if (grid.empty() || grid.size() != y.size()) {
    throw InvalidArgument("peak_prevalence: empty or mismatched series");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] > y[best]) best = i;
  }
  if (best == 0 || best + 1 == y.size()) {
    return PeakResult{grid[best], y[best], true};
  }
  // Parabola through the three bracketing samples.
  const double t0 = grid[best - 1], t1 = grid[best], t2 = grid[best + 1];
  const double f0 = y[best - 1], f1 = y[best], f2 = y[best + 1];
  const double d1 = (f1 - f0) / (t1 - t0);
  const double d2 = (f2 - f1) / (t2 - t1);
  const double curv = (d2 - d1) / (t2 - t0);
  if (!(curv < 0.0)) {
    return PeakResult{t1, f1, false};
  }
  const double tp = 0.5 * (t0 + t1 - d1 / curv);
  const double l0 = (tp - t1) * (tp - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (tp - t0) * (tp - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (tp - t0) * (tp - t1) / ((t2 - t0) * (t2 - t1));
  return PeakResult{tp, f0 * l0 + f1 * l1 + f2 * l2, false};
}

QsSimulateResult qs_simulate(const Graph& g, const EpidemicParams& p, double burn_in, int samples,
                             std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("qs_simulate: samples must be >= 1");
  if (!(burn_in >= 0.0)) throw InvalidArgument("qs_simulate: burn_in must be nonnegative");
  const int n = g.num_nodes();
  const double nd = static_cast<double>(n);

  Walker walker(Model::SIS, g, p.tau);
  std::vector<int> everyone(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) everyone[static_cast<std::size_t>(v)] = v;
  walker.reset(everyone);
  Xoshiro256 rng(seed);

  constexpr std::size_t kReservoirSize = 100;
  constexpr double kReservoirUpdateProb = 0.1;
  std::vector<std::vector<int>> reservoir;
  reservoir.push_back(everyone);

  const double t_end = burn_in + static_cast<double>(samples);
  double t = 0.0;
  QsSimulateResult result;

  // Time-weighted accumulators over [burn_in, t_end).
  double w_total = 0.0, w_z = 0.0, w_z2 = 0.0, w_cut = 0.0;
  std::vector<double> w_node(static_cast<std::size_t>(n), 0.0);
  std::vector<double> w_pair(g.edges().size(), 0.0);
  std::vector<double> batch_z(static_cast<std::size_t>(samples), 0.0);

  auto accumulate = [&](double from, double to) {
    const double a = std::max(from, burn_in);
    const double b = std::min(to, t_end);
    if (b <= a) return;
    const double w = b - a;
    const double z = walker.infected_count() / nd;
    w_total += w;
    w_z += w * z;
    w_z2 += w * z * z;
    w_cut += w * walker.cut();
    for (int v : walker.infected_set()) w_node[static_cast<std::size_t>(v)] += w;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const auto [u, v] = g.edges()[e];
      if (walker.compartment(u) == Compartment::I && walker.compartment(v) == Compartment::I) {
        w_pair[e] += w;
      }
    }
    // Unit-length batch means feed the standard error.
    double left = a;
    while (left < b) {
      const int batch = std::min(samples - 1, static_cast<int>(left - burn_in));
      const double right = std::min(b, burn_in + static_cast<double>(batch + 1));
      batch_z[static_cast<std::size_t>(batch)] += (right - left) * z;
      left = right;
    }
  };

  while (t < t_end) {
    if (walker.absorbed()) {
      // Restart at the same instant from a uniformly drawn reservoir state.
      const auto& revive = reservoir[static_cast<std::size_t>(rng.below(reservoir.size()))];
      walker.reset(revive);
      ++result.restarts;
      continue;
    }
    const double dt = walker.sample_dt(rng);
    const double t_next = t + dt;
    accumulate(t, t_next);  // current state holds over [t, t_next)
    if (t_next >= t_end) break;
    walker.apply_event(rng);
    t = t_next;
    if (walker.infected_count() > 0 && rng.uniform() < kReservoirUpdateProb) {
      if (reservoir.size() < kReservoirSize) {
        reservoir.push_back(walker.infected_set());
      } else {
        reservoir[static_cast<std::size_t>(rng.below(kReservoirSize))] = walker.infected_set();
      }
    }
  }

  if (w_total <= 0.0) {
    result.low_occupancy = true;
    return result;
  }
  result.y_qs = w_z / w_total;
  result.mean_cut = w_cut / w_total;
  const double var_z = std::max(0.0, w_z2 / w_total - result.y_qs * result.y_qs);
  result.susceptibility = result.y_qs > 0.0 ? nd * var_z / result.y_qs : 0.0;

  double best = 0.0;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto [u, v] = g.edges()[e];
    if (w_node[static_cast<std::size_t>(v)] > 0.0) {
      best = std::max(best, w_pair[e] / w_node[static_cast<std::size_t>(v)]);
    }
    if (w_node[static_cast<std::size_t>(u)] > 0.0) {
      best = std::max(best, w_pair[e] / w_node[static_cast<std::size_t>(u)]);
    }
  }
  result.max_link_conditional = best;

  if (samples >= 2) {
    double mean = 0.0;
    for (double b : batch_z) mean += b;
    mean /= samples;
    double var = 0.0;
    for (double b : batch_z) var += (b - mean) * (b - mean);
    var /= (samples - 1);
    result.y_qs_se = std::sqrt(var / samples);
  }
  result.low_occupancy = result.y_qs < 2.0 / nd;
  return result;
}

}  // namespace epinet
