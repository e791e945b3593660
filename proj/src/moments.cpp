#include "epinet/moments.hpp"

#include <bit>

#include "epinet/errors.hpp"

namespace epinet {

namespace {

// Compensated (Kahan) accumulator; the Laplacian-vs-degree-form agreement
// check needs sums accurate to a few ulps.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double value) {
    const double y = value - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

StateObservables::StateObservables(const Graph& g, const StateSpace& space) : space_(space) {
  if (g.num_nodes() != space.num_nodes()) {
    throw InvalidArgument("StateObservables: graph does not match the state space dimension");
  }
  const std::uint64_t size = space.size();
  n_inf_.resize(size);
  n_rem_.resize(size);
  cut_.resize(size);
  deg_.resize(size);
  self_.resize(size);
  mixed_.resize(size);
  for (std::uint64_t s = 0; s < size; ++s) {
    const std::uint64_t inf = space.infected_mask(s);
    const std::uint64_t rem = space.removed_mask(s);
    n_inf_[s] = static_cast<std::uint8_t>(std::popcount(inf));
    n_rem_[s] = static_cast<std::uint8_t>(std::popcount(rem));
    cut_[s] = static_cast<std::uint16_t>(g.cut_size(inf));
    deg_[s] = static_cast<std::uint16_t>(g.degree_sum(inf));
    self_[s] = static_cast<std::uint16_t>(g.internal_adjacency(inf));
    mixed_[s] = static_cast<std::uint16_t>(g.mixed_adjacency(inf, rem));
  }
}

MomentRecord StateObservables::moments(std::span<const double> dist, double t_star) const {
  if (dist.size() != space_.size()) {
    throw InvalidArgument("moments: distribution has wrong dimension");
  }
  const double n = static_cast<double>(space_.num_nodes());
  Kahan y_i, y_r, zz, e_cut, e_mixed, e_z_cut, s_i, e_deg, e_self;
  for (std::uint64_t s = 0; s < dist.size(); ++s) {
    const double p = dist[s];
    if (p == 0.0) continue;
    const double ni = n_inf_[s];
    const double z = ni / n;
    y_i.add(p * z);
    y_r.add(p * (n_rem_[s] / n));
    zz.add(p * z * z);
    e_cut.add(p * cut_[s]);
    e_mixed.add(p * mixed_[s]);
    e_z_cut.add(p * z * cut_[s]);
    s_i.add(p * ni * (ni - 1.0));
    e_deg.add(p * deg_[s]);
    e_self.add(p * self_[s]);
  }
  MomentRecord rec;
  rec.t_star = t_star;
  rec.y_I = y_i.sum;
  rec.y_R = y_r.sum;
  rec.var_z = zz.sum - y_i.sum * y_i.sum;
  rec.e_cut = e_cut.sum;
  rec.e_mixed = e_mixed.sum;
  rec.e_z_cut = e_z_cut.sum;
  rec.s_I = s_i.sum;
  rec.e_deg = e_deg.sum;
  rec.e_self = e_self.sum;
  return rec;
}

std::vector<MomentRecord> prevalence_moments(const DistributionTrajectory& traj, const Graph& g) {
  StateObservables obs(g, traj.space);
  std::vector<MomentRecord> out;
  out.reserve(traj.grid.size());
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    out.push_back(obs.moments(traj.dists[k], traj.grid[k]));
  }
  return out;
}

}  // namespace epinet
