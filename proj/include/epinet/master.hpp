#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "epinet/generator.hpp"

namespace epinet {

// Distribution over the full state space sampled on a scaled-time grid
// t* = delta * t. Memory grows as size() * grid points; for long dense
// grids prefer the streaming integrate_master overload.
struct DistributionTrajectory {
  StateSpace space;
  std::vector<double> grid;
  std::vector<std::vector<double>> dists;
  double tol = 0.0;
};

using GridVisitor = std::function<void(std::size_t, std::span<const double>)>;

// Integrates the Kolmogorov forward system dp/dt* = G^T p / delta through
// every grid point (grid[0] must be 0) and hands each distribution to the
// visitor. Probabilities are never clipped inside the integrator.
void integrate_master(const Generator& gen, std::span<const double> init,
                      std::span<const double> grid, double tol, const GridVisitor& visit);

DistributionTrajectory integrate_master(const Generator& gen, std::span<const double> init,
                                        std::span<const double> grid, double tol = 1e-8);

// Point mass on the state with `infected` nodes infected and the rest
// susceptible.
std::vector<double> deterministic_init(const StateSpace& space, std::span<const int> infected);

// Pr[node in compartment c] along the grid, clipped to [0,1] for reporting.
std::vector<double> marginal(const DistributionTrajectory& traj, int node, Compartment c);

// Joint probability of a conjunction of (node, compartment) requirements.
std::vector<double> joint_series(const DistributionTrajectory& traj,
                                 std::span<const std::pair<int, Compartment>> assignment);

std::vector<double> uniform_time_grid(double t_max, int points);

}  // namespace epinet
