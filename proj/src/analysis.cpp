#include "epinet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epinet/detail/dopri5.hpp"
#include "epinet/errors.hpp"
#include "epinet/gillespie.hpp"
#include "epinet/master.hpp"
#include "epinet/residuals.hpp"

namespace epinet {

double threshold_lower_bound(const Graph& g) {
  if (g.num_edges() == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / spectral_radius(g).lambda1;
}

double threshold_upper_bound(const Graph& g, double eps) {
  if (!(eps >= 0.0) || eps >= 1.0) {
    throw InvalidArgument("threshold_upper_bound: eps must lie in [0, 1)");
  }
  if (g.min_degree() == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / (g.min_degree() * (1.0 - eps));
}

double threshold_upper_bound_asymptotic(const Graph& g) {
  if (g.min_degree() == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / g.min_degree();
}

double yimax_regular(const Graph& g, const EpidemicParams& p, double e_term) {
  const double r = static_cast<double>(g.regular_degree());  // throws if not regular
  const double denom = r * p.tau - 1.0;
  if (denom == 0.0) throw InvalidArgument("yimax_regular: r*tau = 1 is singular");
  return p.tau / g.num_nodes() * e_term / denom;
}

YimaxEnvelope yimax_envelope(const Graph& g, const EpidemicParams& p, double e_term) {
  YimaxEnvelope env;
  const double n = g.num_nodes();
  const double lo_denom = p.tau * g.max_degree() - 1.0;
  const double hi_denom = p.tau * g.min_degree() - 1.0;
  if (lo_denom <= 0.0) {
    env.peak_zero = true;  // subcritical for every degree: no positive peak
    return env;
  }
  env.lower = p.tau / n * e_term / lo_denom;
  if (hi_denom > 0.0) env.upper = p.tau / n * e_term / hi_denom;
  return env;
}

double quadratic_interpolate(std::span<const double> grid, std::span<const double> series,
                             double t) {
  if (grid.size() < 3 || grid.size() != series.size()) {
    throw InvalidArgument("quadratic_interpolate: need a series with >= 3 points");
  }
  // Bracketing index of t, clamped to keep a full 3-point stencil.
  std::size_t i = 1;
  while (i + 2 < grid.size() && grid[i + 1] < t) ++i;
  const double t0 = grid[i - 1], t1 = grid[i], t2 = grid[i + 1];
  const double l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
  return series[i - 1] * l0 + series[i] * l1 + series[i + 1] * l2;
}

ExtremalVarianceCheck variance_extremal_check(std::span<const MomentRecord> moments,
                                              const EpidemicParams& p, int num_nodes) {
  ExtremalVarianceCheck out;
  if (moments.size() < 3) return out;
  const double n = static_cast<double>(num_nodes);
  const double tau = p.tau;

  std::vector<double> grid(moments.size()), var(moments.size());
  std::vector<double> y(moments.size()), e_cut(moments.size()), e_z_cut(moments.size());
  for (std::size_t i = 0; i < moments.size(); ++i) {
    grid[i] = moments[i].t_star;
    var[i] = moments[i].var_z;
    y[i] = moments[i].y_I;
    e_cut[i] = moments[i].e_cut;
    e_z_cut[i] = moments[i].e_z_cut;
  }

  for (std::size_t i = 1; i + 1 < moments.size(); ++i) {
    const double dl = var[i] - var[i - 1];
    const double dr = var[i + 1] - var[i];
    if (!(dl * dr < 0.0)) continue;  // strict sign change only
    // Vertex of the parabola through the three bracketing samples.
    const double t0 = grid[i - 1], t1 = grid[i], t2 = grid[i + 1];
    const double d1 = dl / (t1 - t0);
    const double d2 = dr / (t2 - t1);
    const double curv = (d2 - d1) / (t2 - t0);
    const double tv = curv != 0.0 ? 0.5 * (t0 + t1 - d1 / curv) : t1;

    VarianceExtremum ex;
    ex.t_star = tv;
    ex.variance = quadratic_interpolate(grid, var, tv);
    const double yv = quadratic_interpolate(grid, y, tv);
    const double cutv = quadratic_interpolate(grid, e_cut, tv);
    const double zcutv = quadratic_interpolate(grid, e_z_cut, tv);
    ex.predicted =
        tau / n * (zcutv - yv * cutv) + (yv + tau / n * cutv) / (2.0 * n);
    ex.residual = std::abs(ex.variance - ex.predicted);
    out.max_residual = std::max(out.max_residual, ex.residual);
    out.extrema.push_back(ex);
  }
  out.found = !out.extrema.empty();
  return out;
}

NimfaState nimfa_solve(const Graph& g, double tau, double tol, int max_iterations) {
  if (!(tau > 0.0)) throw InvalidArgument("nimfa_solve: tau must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("nimfa_solve: tol must be positive");
  const int n = g.num_nodes();
  std::vector<double> v(static_cast<std::size_t>(n), 0.9);
  std::vector<double> s(static_cast<std::size_t>(n), 0.0);

  NimfaState state;
  state.tau = tau;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
      s[static_cast<std::size_t>(i)] = acc;
    }
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double target = tau * s[ui] / (1.0 + tau * s[ui]);
      const double next = 0.5 * v[ui] + 0.5 * target;  // damping 0.5
      diff = std::max(diff, std::abs(next - v[ui]));
      v[ui] = next;
    }
    if (diff <= tol) {
      state.iterations = iter;
      break;
    }
    if (iter == max_iterations) {
      throw ConvergenceError("nimfa_solve: damped iteration did not converge");
    }
  }

  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
    const auto ui = static_cast<std::size_t>(i);
    defect = std::max(defect, std::abs(-v[ui] + tau * (1.0 - v[ui]) * acc));
  }
  state.residual = defect;
  state.v = std::move(v);
  return state;
}

std::vector<std::vector<double>> nimfa_trajectory(const Graph& g, double tau,
                                                  std::span<const double> v0,
                                                  std::span<const double> grid, double tol) {
  const int n = g.num_nodes();
  if (static_cast<int>(v0.size()) != n) throw InvalidArgument("nimfa_trajectory: bad v0 length");
  for (double x : v0) {
    if (!(x >= 0.0) || !(x <= 1.0)) throw InvalidArgument("nimfa_trajectory: v0 outside [0,1]");
  }

  auto rhs = [&g, tau, n](std::span<const double> v, std::span<double> dv) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
      const auto ui = static_cast<std::size_t>(i);
      dv[ui] = -v[ui] + tau * (1.0 - v[ui]) * acc;
    }
  };

  std::vector<std::vector<double>> out(grid.size());
  std::vector<double> v(v0.begin(), v0.end());
  detail::OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-4;
  detail::integrate_dopri5(rhs, v, grid, opt,
                           [&out](std::size_t k, std::span<const double> state) {
                             out[k].assign(state.begin(), state.end());
                           });
  return out;
}

NimfaDominance nimfa_dominance_check(const Graph& g, const EpidemicParams& p,
                                     std::span<const int> init, double horizon, int grid_points,
                                     double tol) {
  const int n = g.num_nodes();
  const auto grid = uniform_time_grid(horizon, grid_points);

  std::vector<double> v0(static_cast<std::size_t>(n), 0.0);
  for (int v : init) {
    if (v < 0 || v >= n) throw InvalidArgument("nimfa_dominance_check: init node out of range");
    v0[static_cast<std::size_t>(v)] = 1.0;
  }
  const auto nimfa = nimfa_trajectory(g, p.tau, v0, grid, tol);

  const Generator sis = build_sis_generator(g, p);
  const Generator sir = build_sir_generator(g, p);
  const auto init_sis = deterministic_init(sis.space, init);
  const auto init_sir = deterministic_init(sir.space, init);
  const auto rt_sis = reduce_trajectory(sis, g, init_sis, grid, tol);
  const auto rt_sir = reduce_trajectory(sir, g, init_sir, grid, tol);

  NimfaDominance out;
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out.nimfa_vs_sis = std::max(out.nimfa_vs_sis, rt_sis.p_inf[uj][k] - nimfa[k][uj]);
      out.sis_vs_sir = std::max(out.sis_vs_sir, rt_sir.p_inf[uj][k] - rt_sis.p_inf[uj][k]);
    }
  }
  return out;
}

namespace {

ThresholdCurvePoint exact_curve_point(const Graph& g, double tau, double qs_tol) {
  const Generator gen = build_sis_generator(g, EpidemicParams::from_tau(tau));
  const QuasiStationary qs = quasi_stationary(gen, qs_tol);
  const StateObservables obs(g, gen.space);
  ThresholdCurvePoint pt;
  pt.tau = tau;
  pt.y_qs = qs_prevalence(qs, obs);
  const double e_cut = qs_expected_cut(qs, obs);
  pt.h_tau = e_cut > 0.0 ? g.num_nodes() * pt.y_qs / e_cut
                         : std::numeric_limits<double>::infinity();
  pt.chi = qs_susceptibility(qs, obs);
  pt.eps_link_max = qs_max_link_conditional(qs, g);
  return pt;
}

ThresholdCurvePoint simulated_curve_point(const Graph& g, double tau, const EstimateOptions& opt,
                                          std::size_t index) {
  const QsSimulateResult sim = qs_simulate(g, EpidemicParams::from_tau(tau), opt.sim_burn_in,
                                           opt.sim_samples, opt.seed + index);
  ThresholdCurvePoint pt;
  pt.tau = tau;
  pt.y_qs = sim.y_qs;
  pt.h_tau = sim.mean_cut > 0.0 ? g.num_nodes() * sim.y_qs / sim.mean_cut
                                : std::numeric_limits<double>::infinity();
  pt.chi = sim.susceptibility;
  pt.eps_link_max = sim.max_link_conditional;
  return pt;
}

}  // namespace

ThresholdEstimate estimate_threshold(const Graph& g, std::span<const double> tau_grid,
                                     ThresholdMethod method, QsBackend backend,
                                     const EstimateOptions& opt) {
  if (tau_grid.empty()) throw InvalidArgument("estimate_threshold: empty tau grid");
  for (std::size_t i = 1; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > tau_grid[i - 1])) {
      throw InvalidArgument("estimate_threshold: tau grid must be strictly increasing");
    }
  }

  ThresholdEstimate est;
  est.method = method;
  est.backend = backend;
  est.curve.reserve(tau_grid.size());
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    est.curve.push_back(backend == QsBackend::ExactQs
                            ? exact_curve_point(g, tau_grid[i], opt.qs_tol)
                            : simulated_curve_point(g, tau_grid[i], opt, i));
  }

  const double band = 2.0 / static_cast<double>(g.num_nodes());
  if (method == ThresholdMethod::Eq12Ratio) {
    for (const auto& pt : est.curve) {
      if (pt.y_qs >= band && std::isfinite(pt.h_tau) && pt.h_tau > 0.0) {
        est.tau_hat = pt.h_tau;
        est.anchor_tau = pt.tau;
        est.anchor_eps = pt.eps_link_max;
        est.resolved = true;
        break;
      }
    }
  } else {
    std::size_t best = 0;
    for (std::size_t i = 1; i < est.curve.size(); ++i) {
      if (est.curve[i].chi > est.curve[best].chi) best = i;
    }
    if (best > 0 && best + 1 < est.curve.size()) {
      std::vector<double> taus(est.curve.size()), chis(est.curve.size());
      for (std::size_t i = 0; i < est.curve.size(); ++i) {
        taus[i] = est.curve[i].tau;
        chis[i] = est.curve[i].chi;
      }
      const PeakResult peak = peak_prevalence(taus, chis);
      est.tau_hat = peak.t_peak;
      // Anchor at the smallest grid point at or above the refined peak.
      std::size_t anchor = best;
      while (anchor + 1 < est.curve.size() && est.curve[anchor].tau < est.tau_hat) ++anchor;
      est.anchor_tau = est.curve[anchor].tau;
      est.anchor_eps = est.curve[anchor].eps_link_max;
      est.resolved = true;
    } else if (!est.curve.empty()) {
      est.tau_hat = est.curve[best].tau;
      est.anchor_tau = est.curve[best].tau;
      est.anchor_eps = est.curve[best].eps_link_max;
      est.resolved = false;  // boundary peak: grid did not bracket it
    }
  }
  return est;
}

std::vector<double> default_tau_grid(double lambda1, int points) {
  if (!(lambda1 > 0.0)) throw InvalidArgument("default_tau_grid: lambda1 must be positive");
  if (points < 2) throw InvalidArgument("default_tau_grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double lo = 0.8 / lambda1;
  const double hi = 3.0 / lambda1;
  for (int k = 0; k < points; ++k) {
    grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  }
  return grid;
}

ThresholdReport threshold_report(const Graph& g, const ReportOptions& opt) {
  ThresholdReport report;
  if (g.num_edges() == 0) {
    report.lambda1 = 0.0;
    report.lower_bound = std::numeric_limits<double>::infinity();
    report.upper_bound = std::numeric_limits<double>::infinity();
    report.upper_bound_asymptotic = std::numeric_limits<double>::infinity();
    report.consistent = true;  // vacuous: no spreading is possible at any tau
    return report;
  }
  report.lambda1 = spectral_radius(g).lambda1;
  report.lower_bound = 1.0 / report.lambda1;
  report.epsilon_g = epsilon_g(g, default_epsilon_sweep(report.lambda1, opt.eps_points));
  report.tau_hat = estimate_threshold(g, default_tau_grid(report.lambda1, opt.tau_points),
                                      opt.method, opt.backend, opt.estimate);
  // The bound and the estimate must be read off the same QS state: under any
  // one distribution tau <= h(tau) <= 1/(d_min (1 - eps(tau))) is exact, and
  // on vertex-transitive graphs the second inequality is an equality. The
  // sweep value stays available as the standalone estimate.
  report.epsilon_used =
      report.tau_hat.resolved ? report.tau_hat.anchor_eps : report.epsilon_g.value;
  report.upper_bound =
      threshold_upper_bound(g, report.epsilon_used < 1.0 ? report.epsilon_used : 0.0);
  report.upper_bound_asymptotic = threshold_upper_bound_asymptotic(g);
  const double slack = 1e-9 * std::max(1.0, std::abs(report.upper_bound));
  report.consistent = report.tau_hat.resolved &&
                      report.lower_bound <= report.tau_hat.tau_hat + slack &&
                      report.tau_hat.tau_hat <= report.upper_bound + slack;
  return report;
}

}  // namespace epinet
