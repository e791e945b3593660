#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epinet/graph.hpp"
#include "epinet/params.hpp"
#include "epinet/state_space.hpp"

namespace epinet {

enum class EventKind : std::uint8_t { Infect = 0, Cure = 1, Remove = 2 };

struct Event {
  double t_star;  // scaled time
  std::int32_t node;
  EventKind kind;
};

struct EventTrace {
  Model model = Model::SIS;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::vector<int> init;
  std::vector<Event> events;
};

// Statistically exact event-driven simulation of the SIS/SIR chain in
// scaled time (cure rate 1, infection rate tau per infected neighbor).
// Deterministic given the seed. An empty init yields an empty trace.
EventTrace simulate(Model model, const Graph& g, const EpidemicParams& p,
                    std::span<const int> init, double horizon, std::uint64_t seed);

struct EnsembleRow {
  double mean_zI = 0.0, se_zI = 0.0, var_zI = 0.0;
  double mean_zR = 0.0, se_zR = 0.0;
  double mean_cut = 0.0, se_cut = 0.0;      // w_I^T Q w_I
  double mean_mixed = 0.0, se_mixed = 0.0;  // w_I^T A w_R
  double mean_zcut = 0.0, se_zcut = 0.0;    // Z_I * w_I^T Q w_I
};

struct EnsembleStats {
  std::vector<double> grid;
  std::vector<EnsembleRow> rows;
  int runs = 0;
  std::uint64_t master_seed = 0;
};

// Independent runs with per-run streams derive_stream(master_seed, run);
// per-run summaries are reduced in run order, so the result is identical
// for any thread count.
EnsembleStats ensemble(Model model, const Graph& g, const EpidemicParams& p,
                       std::span<const int> init, double horizon, int runs,
                       std::span<const double> grid, std::uint64_t master_seed, int threads = 1);

struct PeakResult {
  double t_peak = 0.0;
  double y_max = 0.0;
  bool boundary = false;  // maximum sits on the grid edge (monotone series)
};

// Grid argmax with 3-point parabolic refinement.
PeakResult peak_prevalence(std::span<const double> grid, std::span<const double> y);

struct QsSimulateResult {
  double y_qs = 0.0;
  double y_qs_se = 0.0;     // batch-means standard error
  double mean_cut = 0.0;    // time-averaged w_I^T Q w_I
  double max_link_conditional = 0.0;
  double susceptibility = 0.0;
  long restarts = 0;
  bool low_occupancy = false;
};

// Quasi-stationary SIS estimator: on absorption the walk restarts from a
// state drawn uniformly from a bounded reservoir (size 100) of previously
// visited active states. Time averages are taken over `samples` unit-length
// scaled-time batches after a burn_in period.
QsSimulateResult qs_simulate(const Graph& g, const EpidemicParams& p, double burn_in, int samples,
                             std::uint64_t seed);

}  // namespace epinet
