#pragma once

#include <span>
#include <utility>
#include <vector>

#include "epinet/generator.hpp"
#include "epinet/moments.hpp"

namespace epinet {

// Marginals, adjacent-pair joints and moments of an exact solve, kept per
// grid point. This is all the residual checks need, so long dense grids can
// be handled streaming without storing full distributions.
struct ReducedTrajectory {
  Model model = Model::SIS;
  int n = 0;
  double tau = 0.0;
  std::vector<double> grid;
  std::vector<std::pair<int, int>> edges;
  // Series indexed [node][time] / [edge][time].
  std::vector<std::vector<double>> p_inf;
  std::vector<std::vector<double>> p_rem;     // SIR only
  std::vector<std::vector<double>> j_ii;      // Pr[both endpoints infected]
  std::vector<std::vector<double>> j_ri_fwd;  // Pr[first removed, second infected] (SIR)
  std::vector<std::vector<double>> j_ri_bwd;  // Pr[second removed, first infected] (SIR)
  std::vector<MomentRecord> moments;
};

// Integrates and reduces in one streaming pass.
ReducedTrajectory reduce_trajectory(const Generator& gen, const Graph& g,
                                    std::span<const double> init, std::span<const double> grid,
                                    double tol = 1e-8);
ReducedTrajectory reduce_trajectory(const DistributionTrajectory& traj, const Graph& g,
                                    const EpidemicParams& p);

// Max-absolute residual of the per-node governing equations, comparing a
// central finite difference of each marginal against the exact right-hand
// side assembled from marginals and adjacent-pair joints. In scaled time:
//   SIS:  dPr[X_j=I]/dt* = tau*sum_k a_kj Pr[X_k=I] - Pr[X_j=I]
//                          - tau*sum_k a_kj Pr[X_j=I, X_k=I]
//   SIR:  same with the extra -tau*sum_k a_kj Pr[Y_j=R, Y_k=I] term, plus
//         dPr[Y_j=R]/dt* = Pr[Y_j=I].
// fd_order is 2 (3-point) or 4 (5-point, uniform grids only).
struct GoverningResidual {
  double infection = 0.0;  // SIS eq. or SIR infection eq.
  double removal = 0.0;    // SIR removal eq.; 0 for SIS
  double max() const { return infection > removal ? infection : removal; }
};
GoverningResidual residual_governing(const ReducedTrajectory& rt, const Graph& g, int fd_order = 2);
GoverningResidual residual_governing(const DistributionTrajectory& traj, const Graph& g,
                                     const EpidemicParams& p, int fd_order = 2);

// Prevalence ODE dy_I/dt* = -y_I + (tau/N) E[w_I^T Q w_I - w_I^T A w_R],
// checked in both the Laplacian form and the degree-vector form
// E[D^T w_I - w_I^T A w_I - w_I^T A w_R]; form_agreement is the max
// pointwise gap between the two right-hand sides.
struct PrevalenceOdeResidual {
  double laplacian_form = 0.0;
  double degree_form = 0.0;
  double form_agreement = 0.0;
  double max_ode() const { return laplacian_form > degree_form ? laplacian_form : degree_form; }
};
PrevalenceOdeResidual residual_prevalence_ode(const ReducedTrajectory& rt, int fd_order = 2);
PrevalenceOdeResidual residual_prevalence_ode(const DistributionTrajectory& traj, const Graph& g,
                                              const EpidemicParams& p, int fd_order = 2);

// SIS variance ODE
//   dVar[Z_I]/dt* = -2 Var[Z_I] + (2 tau/N){E[Z_I w^T Q w] - y_I E[w^T Q w]}
//                   + (1/N)(y_I + (tau/N) E[w^T Q w])
// plus the intermediate pair-sum ODE ds_I/dt* = -2 s_I + 2 N tau E[Z_I w^T Q w].
struct VarianceOdeResidual {
  double variance = 0.0;
  double pair_sum = 0.0;
};
VarianceOdeResidual residual_variance_ode(const ReducedTrajectory& rt, int fd_order = 2);
VarianceOdeResidual residual_variance_ode(const DistributionTrajectory& traj, const Graph& g,
                                          const EpidemicParams& p, int fd_order = 2);

// Central finite-difference derivative (order 2 or 4) on the interior of the
// grid; first/last point(s) are skipped. Returns one value per usable index,
// alongside the index range [first, last).
struct FiniteDifference {
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<double> deriv;
};
FiniteDifference finite_difference(std::span<const double> grid, std::span<const double> series,
                                   int order);

}  // namespace epinet
