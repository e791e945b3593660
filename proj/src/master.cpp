#include "epinet/master.hpp"

#include <algorithm>
#include <cmath>

#include "epinet/detail/dopri5.hpp"
#include "epinet/errors.hpp"

namespace epinet {

void integrate_master(const Generator& gen, std::span<const double> init,
                      std::span<const double> grid, double tol, const GridVisitor& visit) {
  const std::uint64_t size = gen.size();
  if (init.size() != size) throw InvalidArgument("integrate_master: init has wrong dimension");
  if (!(tol > 0.0)) throw InvalidArgument("integrate_master: tol must be positive");
  if (grid.empty() || grid[0] != 0.0) {
    throw InvalidArgument("integrate_master: grid must start at t* = 0");
  }
  double sum = 0.0;
  for (double v : init) {
    if (v < 0.0) throw InvalidArgument("integrate_master: init must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument("integrate_master: init must sum to 1");
  }

  const double inv_delta = 1.0 / gen.params.delta;
  auto rhs = [&gen, inv_delta](std::span<const double> p, std::span<double> dp) {
    std::fill(dp.begin(), dp.end(), 0.0);
    const std::uint64_t n_states = gen.size();
    for (std::uint64_t s = 0; s < n_states; ++s) {
      const double mass = p[s] * inv_delta;
      dp[s] += gen.diag[s] * mass;
      const std::uint64_t end = gen.row_ptr[s + 1];
      for (std::uint64_t k = gen.row_ptr[s]; k < end; ++k) {
        dp[gen.col[k]] += gen.rate[k] * mass;
      }
    }
  };

  std::vector<double> p(init.begin(), init.end());
  detail::OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-4;
  detail::integrate_dopri5(rhs, p, grid, opt, visit);
}

DistributionTrajectory integrate_master(const Generator& gen, std::span<const double> init,
                                        std::span<const double> grid, double tol) {
  DistributionTrajectory traj{gen.space, {grid.begin(), grid.end()}, {}, tol};
  traj.dists.reserve(grid.size());
  integrate_master(gen, init, grid, tol,
                   [&traj](std::size_t, std::span<const double> dist) {
                     traj.dists.emplace_back(dist.begin(), dist.end());
                   });
  return traj;
}

std::vector<double> deterministic_init(const StateSpace& space, std::span<const int> infected) {
  std::uint64_t state = 0;
  for (int v : infected) {
    if (v < 0 || v >= space.num_nodes()) throw InvalidArgument("init node out of range");
    if (space.model() == Model::SIS) {
      state |= std::uint64_t{1} << v;
    } else {
      if ((state / space.pow3(v)) % 3 != 0) throw InvalidArgument("duplicate init node");
      state += space.pow3(v);
    }
  }
  std::vector<double> dist(space.size(), 0.0);
  dist[state] = 1.0;
  return dist;
}

std::vector<double> marginal(const DistributionTrajectory& traj, int node, Compartment c) {
  const StateSpace& space = traj.space;
  if (node < 0 || node >= space.num_nodes()) throw InvalidArgument("marginal: node out of range");
  if (space.model() == Model::SIS && c == Compartment::R) {
    throw InvalidArgument("marginal: R is not an SIS compartment");
  }
  std::vector<double> out;
  out.reserve(traj.grid.size());
  for (const auto& dist : traj.dists) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < space.size(); ++s) {
      if (space.compartment(s, node) == c) acc += dist[s];
    }
    out.push_back(std::clamp(acc, 0.0, 1.0));
  }
  return out;
}

std::vector<double> joint_series(const DistributionTrajectory& traj,
                                 std::span<const std::pair<int, Compartment>> assignment) {
  const StateSpace& space = traj.space;
  std::vector<char> seen(static_cast<std::size_t>(space.num_nodes()), 0);
  for (auto [node, c] : assignment) {
    if (node < 0 || node >= space.num_nodes()) throw InvalidArgument("joint: node out of range");
    if (seen[static_cast<std::size_t>(node)]) throw InvalidArgument("joint: duplicate node");
    seen[static_cast<std::size_t>(node)] = 1;
    if (space.model() == Model::SIS && c == Compartment::R) {
      throw InvalidArgument("joint: R is not an SIS compartment");
    }
  }
  std::vector<double> out;
  out.reserve(traj.grid.size());
  for (const auto& dist : traj.dists) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < space.size(); ++s) {
      bool match = true;
      for (auto [node, c] : assignment) {
        if (space.compartment(s, node) != c) {
          match = false;
          break;
        }
      }
      if (match) acc += dist[s];
    }
    out.push_back(std::clamp(acc, 0.0, 1.0));
  }
  return out;
}

std::vector<double> uniform_time_grid(double t_max, int points) {
  if (points < 1 || !(t_max >= 0.0)) throw InvalidArgument("bad time grid spec");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    grid[static_cast<std::size_t>(k)] =
        points == 1 ? 0.0 : t_max * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace epinet
