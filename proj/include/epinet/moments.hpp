#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epinet/graph.hpp"
#include "epinet/master.hpp"

namespace epinet {

// Exact observables of one trajectory point. All expectations run over the
// full state space; e_deg - e_self equals e_cut state by state (that is the
// degree-vector identity the residual checks rely on), so the two are
// accumulated separately on purpose.
struct MomentRecord {
  double t_star = 0.0;
  double y_I = 0.0;     // E[Z_I], expected fraction infected
  double y_R = 0.0;     // E[Z_R] (SIR; zero for SIS)
  double var_z = 0.0;   // Var[Z_I]
  double e_cut = 0.0;   // E[w_I^T Q w_I]
  double e_mixed = 0.0; // E[w_I^T A w_R] (SIR; zero for SIS)
  double e_z_cut = 0.0; // E[Z_I w_I^T Q w_I]
  double s_I = 0.0;     // E[sum_{i != j} 1{X_i=I} 1{X_j=I}]
  double e_deg = 0.0;   // E[D^T w_I]
  double e_self = 0.0;  // E[w_I^T A w_I]
};

// Per-state integer observables for one (graph, state space) pair, built
// once and reused across grid points and sweeps.
class StateObservables {
 public:
  StateObservables(const Graph& g, const StateSpace& space);

  const StateSpace& space() const { return space_; }
  int num_nodes() const { return space_.num_nodes(); }

  std::uint8_t infected_count(std::uint64_t s) const { return n_inf_[s]; }
  std::uint8_t removed_count(std::uint64_t s) const { return n_rem_[s]; }
  std::uint16_t cut(std::uint64_t s) const { return cut_[s]; }
  std::uint16_t degree_sum(std::uint64_t s) const { return deg_[s]; }
  std::uint16_t internal_adjacency(std::uint64_t s) const { return self_[s]; }
  std::uint16_t mixed(std::uint64_t s) const { return mixed_[s]; }

  MomentRecord moments(std::span<const double> dist, double t_star) const;

 private:
  StateSpace space_;
  std::vector<std::uint8_t> n_inf_, n_rem_;
  std::vector<std::uint16_t> cut_, deg_, self_, mixed_;
};

std::vector<MomentRecord> prevalence_moments(const DistributionTrajectory& traj, const Graph& g);

}  // namespace epinet
