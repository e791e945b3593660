#include "epinet/residuals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

#include "epinet/errors.hpp"

namespace epinet {

namespace {

struct EdgeIncidence {
  // For node j: list of (neighbor, edge index, j_is_first_endpoint).
  std::vector<std::vector<std::tuple<int, int, bool>>> at;
  explicit EdgeIncidence(const Graph& g) : at(static_cast<std::size_t>(g.num_nodes())) {
    const auto& edges = g.edges();
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      const auto [u, v] = edges[static_cast<std::size_t>(e)];
      at[static_cast<std::size_t>(u)].emplace_back(v, e, true);
      at[static_cast<std::size_t>(v)].emplace_back(u, e, false);
    }
  }
};

void reduce_point(const Graph& g, const StateSpace& space, const StateObservables& obs,
                  std::size_t k, double t_star, std::span<const double> dist,
                  ReducedTrajectory& rt) {
  const int n = space.num_nodes();
  const auto& edges = g.edges();
  const bool sir = space.model() == Model::SIR;

  std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
  std::vector<double> pr(static_cast<std::size_t>(n), 0.0);
  std::vector<double> jii(edges.size(), 0.0);
  std::vector<double> jri_f(edges.size(), 0.0);
  std::vector<double> jri_b(edges.size(), 0.0);

  for (std::uint64_t s = 0; s < dist.size(); ++s) {
    const double p = dist[s];
    if (p == 0.0) continue;
    const std::uint64_t inf = space.infected_mask(s);
    const std::uint64_t rem = sir ? space.removed_mask(s) : 0;
    for (std::uint64_t m = inf; m != 0; m &= m - 1) {
      pi[static_cast<std::size_t>(std::countr_zero(m))] += p;
    }
    if (sir) {
      for (std::uint64_t m = rem; m != 0; m &= m - 1) {
        pr[static_cast<std::size_t>(std::countr_zero(m))] += p;
      }
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::uint64_t bu = std::uint64_t{1} << edges[e].first;
      const std::uint64_t bv = std::uint64_t{1} << edges[e].second;
      if ((inf & bu) && (inf & bv)) jii[e] += p;
      if (sir) {
        if ((rem & bu) && (inf & bv)) jri_f[e] += p;
        if ((rem & bv) && (inf & bu)) jri_b[e] += p;
      }
    }
  }

  for (int v = 0; v < n; ++v) {
    rt.p_inf[static_cast<std::size_t>(v)][k] = pi[static_cast<std::size_t>(v)];
    if (sir) rt.p_rem[static_cast<std::size_t>(v)][k] = pr[static_cast<std::size_t>(v)];
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    rt.j_ii[e][k] = jii[e];
    if (sir) {
      rt.j_ri_fwd[e][k] = jri_f[e];
      rt.j_ri_bwd[e][k] = jri_b[e];
    }
  }
  rt.moments[k] = obs.moments(dist, t_star);
}

ReducedTrajectory make_reduced(const Graph& g, const StateSpace& space, double tau,
                               std::span<const double> grid) {
  ReducedTrajectory rt;
  rt.model = space.model();
  rt.n = space.num_nodes();
  rt.tau = tau;
  rt.grid.assign(grid.begin(), grid.end());
  rt.edges = g.edges();
  const std::size_t pts = grid.size();
  rt.p_inf.assign(static_cast<std::size_t>(rt.n), std::vector<double>(pts, 0.0));
  if (rt.model == Model::SIR) {
    rt.p_rem.assign(static_cast<std::size_t>(rt.n), std::vector<double>(pts, 0.0));
    rt.j_ri_fwd.assign(rt.edges.size(), std::vector<double>(pts, 0.0));
    rt.j_ri_bwd.assign(rt.edges.size(), std::vector<double>(pts, 0.0));
  }
  rt.j_ii.assign(rt.edges.size(), std::vector<double>(pts, 0.0));
  rt.moments.resize(pts);
  return rt;
}

}  // namespace

ReducedTrajectory reduce_trajectory(const Generator& gen, const Graph& g,
                                    std::span<const double> init, std::span<const double> grid,
                                    double tol) {
  ReducedTrajectory rt = make_reduced(g, gen.space, gen.params.tau, grid);
  StateObservables obs(g, gen.space);
  integrate_master(gen, init, grid, tol,
                   [&](std::size_t k, std::span<const double> dist) {
                     reduce_point(g, gen.space, obs, k, grid[k], dist, rt);
                   });
  return rt;
}

ReducedTrajectory reduce_trajectory(const DistributionTrajectory& traj, const Graph& g,
                                    const EpidemicParams& p) {
  ReducedTrajectory rt = make_reduced(g, traj.space, p.tau, traj.grid);
  StateObservables obs(g, traj.space);
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    reduce_point(g, traj.space, obs, k, traj.grid[k], traj.dists[k], rt);
  }
  return rt;
}

FiniteDifference finite_difference(std::span<const double> grid, std::span<const double> series,
                                   int order) {
  if (grid.size() != series.size()) throw InvalidArgument("finite_difference: length mismatch");
  if (order != 2 && order != 4) throw InvalidArgument("finite_difference: order must be 2 or 4");
  const std::size_t pts = grid.size();
  FiniteDifference fd;
  if (order == 2) {
    if (pts < 3) throw InvalidArgument("finite_difference: need at least 3 grid points");
    fd.first = 1;
    fd.last = pts - 1;
    fd.deriv.resize(pts - 2);
    for (std::size_t i = 1; i + 1 < pts; ++i) {
      const double hm = grid[i] - grid[i - 1];
      const double hp = grid[i + 1] - grid[i];
      // Three-point formula, exact for quadratics on nonuniform grids.
      fd.deriv[i - 1] = (series[i + 1] * hm * hm - series[i - 1] * hp * hp +
                         series[i] * (hp * hp - hm * hm)) /
                        (hp * hm * (hp + hm));
    }
  } else {
    if (pts < 5) throw InvalidArgument("finite_difference: need at least 5 grid points");
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < pts; ++i) {
      if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * std::max(1.0, h)) {
        throw InvalidArgument("finite_difference: order-4 stencil needs a uniform grid");
      }
    }
    fd.first = 2;
    fd.last = pts - 2;
    fd.deriv.resize(pts - 4);
    for (std::size_t i = 2; i + 2 < pts; ++i) {
      fd.deriv[i - 2] =
          (-series[i + 2] + 8.0 * series[i + 1] - 8.0 * series[i - 1] + series[i - 2]) / (12.0 * h);
    }
  }
  return fd;
}

GoverningResidual residual_governing(const ReducedTrajectory& rt, const Graph& g, int fd_order) {
  if (rt.grid.size() < 3) throw InvalidArgument("residual_governing: need at least 3 grid points");
  const EdgeIncidence inc(g);
  const double tau = rt.tau;
  GoverningResidual out;

  for (int j = 0; j < rt.n; ++j) {
    const auto& pj = rt.p_inf[static_cast<std::size_t>(j)];
    const FiniteDifference fd = finite_difference(rt.grid, pj, fd_order);
    for (std::size_t i = fd.first; i < fd.last; ++i) {
      double neighbor_inf = 0.0;
      double joint_ii = 0.0;
      double joint_ri = 0.0;
      for (const auto& [k, e, j_first] : inc.at[static_cast<std::size_t>(j)]) {
        neighbor_inf += rt.p_inf[static_cast<std::size_t>(k)][i];
        joint_ii += rt.j_ii[static_cast<std::size_t>(e)][i];
        if (rt.model == Model::SIR) {
          // Pr[Y_j = R, Y_k = I]: j removed is the fwd series when j is the
          // first endpoint of edge e.
          joint_ri += j_first ? rt.j_ri_fwd[static_cast<std::size_t>(e)][i]
                              : rt.j_ri_bwd[static_cast<std::size_t>(e)][i];
        }
      }
      const double rhs = tau * neighbor_inf - pj[i] - tau * (joint_ii + joint_ri);
      out.infection = std::max(out.infection, std::abs(fd.deriv[i - fd.first] - rhs));
    }
    if (rt.model == Model::SIR) {
      const auto& rj = rt.p_rem[static_cast<std::size_t>(j)];
      const FiniteDifference fdr = finite_difference(rt.grid, rj, fd_order);
      for (std::size_t i = fdr.first; i < fdr.last; ++i) {
        out.removal = std::max(out.removal, std::abs(fdr.deriv[i - fdr.first] - pj[i]));
      }
    }
  }
  return out;
}

GoverningResidual residual_governing(const DistributionTrajectory& traj, const Graph& g,
                                     const EpidemicParams& p, int fd_order) {
  return residual_governing(reduce_trajectory(traj, g, p), g, fd_order);
}

PrevalenceOdeResidual residual_prevalence_ode(const ReducedTrajectory& rt, int fd_order) {
  const std::size_t pts = rt.grid.size();
  if (pts < 3) throw InvalidArgument("residual_prevalence_ode: need at least 3 grid points");
  const double n = static_cast<double>(rt.n);
  const double tau = rt.tau;

  std::vector<double> y(pts);
  for (std::size_t i = 0; i < pts; ++i) y[i] = rt.moments[i].y_I;
  const FiniteDifference fd = finite_difference(rt.grid, y, fd_order);

  PrevalenceOdeResidual out;
  for (std::size_t i = 0; i < pts; ++i) {
    const MomentRecord& m = rt.moments[i];
    const double laplacian = -m.y_I + tau / n * (m.e_cut - m.e_mixed);
    const double degree = -m.y_I + tau / n * (m.e_deg - m.e_self - m.e_mixed);
    out.form_agreement = std::max(out.form_agreement, std::abs(laplacian - degree));
    if (i >= fd.first && i < fd.last) {
      const double d = fd.deriv[i - fd.first];
      out.laplacian_form = std::max(out.laplacian_form, std::abs(d - laplacian));
      out.degree_form = std::max(out.degree_form, std::abs(d - degree));
    }
  }
  return out;
}

PrevalenceOdeResidual residual_prevalence_ode(const DistributionTrajectory& traj, const Graph& g,
                                              const EpidemicParams& p, int fd_order) {
  return residual_prevalence_ode(reduce_trajectory(traj, g, p), fd_order);
}

VarianceOdeResidual residual_variance_ode(const ReducedTrajectory& rt, int fd_order) {
  if (rt.model != Model::SIS) {
    throw InvalidArgument("residual_variance_ode: SIS trajectories only");
  }
  const std::size_t pts = rt.grid.size();
  if (pts < 3) throw InvalidArgument("residual_variance_ode: need at least 3 grid points");
  const double n = static_cast<double>(rt.n);
  const double tau = rt.tau;

  std::vector<double> var(pts), pair_sum(pts);
  for (std::size_t i = 0; i < pts; ++i) {
    var[i] = rt.moments[i].var_z;
    pair_sum[i] = rt.moments[i].s_I;
  }
  const FiniteDifference fdv = finite_difference(rt.grid, var, fd_order);
  const FiniteDifference fds = finite_difference(rt.grid, pair_sum, fd_order);

  VarianceOdeResidual out;
  for (std::size_t i = fdv.first; i < fdv.last; ++i) {
    const MomentRecord& m = rt.moments[i];
    const double rhs_var = -2.0 * m.var_z + 2.0 * tau / n * (m.e_z_cut - m.y_I * m.e_cut) +
                           (m.y_I + tau / n * m.e_cut) / n;
    out.variance = std::max(out.variance, std::abs(fdv.deriv[i - fdv.first] - rhs_var));
    const double rhs_s = -2.0 * m.s_I + 2.0 * n * tau * m.e_z_cut;
    out.pair_sum = std::max(out.pair_sum, std::abs(fds.deriv[i - fds.first] - rhs_s));
  }
  return out;
}

VarianceOdeResidual residual_variance_ode(const DistributionTrajectory& traj, const Graph& g,
                                          const EpidemicParams& p, int fd_order) {
  return residual_variance_ode(reduce_trajectory(traj, g, p), fd_order);
}

}  // namespace epinet
