#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "epinet/analysis.hpp"
#include "epinet/errors.hpp"
#include "epinet/gillespie.hpp"
#include "epinet/master.hpp"
#include "epinet/residuals.hpp"

using namespace epinet;

namespace {

ReducedTrajectory exact_series(Model model, const Graph& g, double tau,
                               const std::vector<int>& init, double t_max, int points,
                               double tol = 1e-9) {
  const EpidemicParams p = EpidemicParams::from_tau(tau);
  const Generator gen = model == Model::SIS ? build_sis_generator(g, p) : build_sir_generator(g, p);
  return reduce_trajectory(gen, g, deterministic_init(gen.space, init),
                           uniform_time_grid(t_max, points), tol);
}

// Bisection oracle for the NIMFA fixed point on a star: hub h and common
// leaf value v solve h = tau s/(1 + tau s), s = (N-1) v, v = tau h/(1 + tau h).
double star_hub_fixed_point(int n, double tau) {
  auto defect = [&](double h) {
    const double v = tau * h / (1.0 + tau * h);
    const double s = (n - 1) * v;
    return tau * s / (1.0 + tau * s) - h;
  };
  double lo = 1e-12, hi = 1.0;
  if (defect(lo) < 0.0) return 0.0;  // only the trivial solution
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (defect(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("threshold lower bound closed forms") {
  CHECK(threshold_lower_bound(Graph::complete(5)) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(threshold_lower_bound(Graph::star(10)) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(threshold_lower_bound(Graph::path(3)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::isinf(threshold_lower_bound(Graph::from_edges(4, {}))));
}

TEST_CASE("threshold upper bound arithmetic and rejection") {
  const Graph c8 = Graph::cycle(8);
  CHECK(threshold_upper_bound(c8, 0.0) == doctest::Approx(0.5));
  CHECK(threshold_upper_bound(c8, 0.2) == doctest::Approx(0.625));
  CHECK_THROWS_AS(threshold_upper_bound(c8, 1.0), InvalidArgument);
  CHECK_THROWS_AS(threshold_upper_bound(c8, -0.1), InvalidArgument);
  CHECK(threshold_upper_bound_asymptotic(c8) == doctest::Approx(0.5));
}

TEST_CASE("1/d_max <= 1/lambda1 on random graphs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = Graph::erdos_renyi(9, 0.5, seed);
    if (g.num_edges() == 0) continue;
    CHECK(1.0 / g.max_degree() <= threshold_lower_bound(g) + 1e-12);
  }
}

TEST_CASE("yimax_regular arithmetic, guards, and zero e_term") {
  const Graph k4 = Graph::complete(4);
  const EpidemicParams p = EpidemicParams::from_tau(1.0);
  CHECK(yimax_regular(k4, p, 6.0) == doctest::Approx(0.75));
  CHECK(yimax_regular(k4, p, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(yimax_regular(Graph::star(5), p, 1.0), InvalidArgument);
  CHECK_THROWS_AS(yimax_regular(k4, EpidemicParams::from_tau(1.0 / 3.0), 1.0), InvalidArgument);
}

TEST_CASE("Eq. (9): exact SIR peak on C_6 and K_4 at tau = 2/lambda1") {
  struct Case {
    Graph g;
    double tau;
  };
  for (const Case& c : {Case{Graph::cycle(6), 1.0}, Case{Graph::complete(4), 2.0 / 3.0}}) {
    const auto rt = exact_series(Model::SIR, c.g, c.tau, {0}, 6.0, 6001, 1e-10);
    std::vector<double> y(rt.grid.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = rt.moments[k].y_I;
    const PeakResult peak = peak_prevalence(rt.grid, y);
    REQUIRE(!peak.boundary);

    // e_term = E[w_I^T A (w_I + w_R)] = (e_deg - e_cut) + e_mixed at the peak.
    std::vector<double> e_term(rt.grid.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
      e_term[k] = rt.moments[k].e_deg - rt.moments[k].e_cut + rt.moments[k].e_mixed;
    }
    const double e_at_peak = quadratic_interpolate(rt.grid, e_term, peak.t_peak);
    const double predicted = yimax_regular(c.g, EpidemicParams::from_tau(c.tau), e_at_peak);
    CHECK(std::abs(predicted - peak.y_max) <= 1e-6);
  }
}

TEST_CASE("envelope collapses to the regular formula on regular graphs") {
  const Graph c6 = Graph::cycle(6);
  const EpidemicParams p = EpidemicParams::from_tau(1.0);
  const YimaxEnvelope env = yimax_envelope(c6, p, 4.2);
  REQUIRE(env.lower.has_value());
  REQUIRE(env.upper.has_value());
  CHECK(*env.lower == doctest::Approx(*env.upper));
  CHECK(*env.lower == doctest::Approx(yimax_regular(c6, p, 4.2)));
  CHECK(*env.lower <= *env.upper);
}

TEST_CASE("envelope edge cases") {
  const Graph star = Graph::star(6);  // d_min 1, d_max 5
  CHECK(yimax_envelope(star, EpidemicParams::from_tau(0.1), 1.0).peak_zero);
  const YimaxEnvelope one_sided = yimax_envelope(star, EpidemicParams::from_tau(0.5), 1.0);
  CHECK(!one_sided.peak_zero);
  CHECK(one_sided.lower.has_value());
  CHECK(!one_sided.upper.has_value());
  const YimaxEnvelope zero = yimax_envelope(star, EpidemicParams::from_tau(2.0), 0.0);
  CHECK(*zero.lower == doctest::Approx(0.0));
  CHECK(*zero.upper == doctest::Approx(0.0));
}

TEST_CASE("star SIR peak lies inside the degree envelope at tau = 2") {
  const Graph star = Graph::star(8);
  const double tau = 2.0;
  const auto rt = exact_series(Model::SIR, star, tau, {0}, 5.0, 2501, 1e-9);
  std::vector<double> y(rt.grid.size()), e_term(rt.grid.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = rt.moments[k].y_I;
    e_term[k] = rt.moments[k].e_deg - rt.moments[k].e_cut + rt.moments[k].e_mixed;
  }
  const PeakResult peak = peak_prevalence(rt.grid, y);
  REQUIRE(!peak.boundary);
  const YimaxEnvelope env =
      yimax_envelope(star, EpidemicParams::from_tau(tau),
                     quadratic_interpolate(rt.grid, e_term, peak.t_peak));
  REQUIRE(env.lower.has_value());
  REQUIRE(env.upper.has_value());
  CHECK(peak.y_max >= *env.lower - 1e-9);
  CHECK(peak.y_max <= *env.upper + 1e-9);
}

TEST_CASE("extremal variance formula holds at located extrema") {
  const Graph k4 = Graph::complete(4);
  const double tau = 1.0;
  const auto rt = exact_series(Model::SIS, k4, tau, {0}, 8.0, 8001, 1e-10);
  const ExtremalVarianceCheck check =
      variance_extremal_check(rt.moments, EpidemicParams::from_tau(tau), 4);
  REQUIRE(check.found);
  CHECK(check.max_residual <= 1e-6);
}

TEST_CASE("constant-zero trajectory has no variance extremum") {
  const Graph k3 = Graph::complete(3);
  const auto rt = exact_series(Model::SIS, k3, 1.0, {}, 1.0, 101);
  const ExtremalVarianceCheck check =
      variance_extremal_check(rt.moments, EpidemicParams::from_tau(1.0), 3);
  CHECK_FALSE(check.found);
}

TEST_CASE("NIMFA steady state on K_5 and below threshold") {
  const NimfaState k5 = nimfa_solve(Graph::complete(5), 1.0);
  for (double v : k5.v) CHECK(v == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(k5.residual <= 1e-9);

  // tau = 0.5/lambda1: the only steady state is v = 0.
  const Graph c6 = Graph::cycle(6);
  const NimfaState sub = nimfa_solve(c6, 0.25);
  for (double v : sub.v) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("NIMFA star fixed point matches the two-variable bisection oracle") {
  const int n = 10;
  const double tau = 0.5;
  const NimfaState state = nimfa_solve(Graph::star(n), tau, 1e-13);
  const double hub = star_hub_fixed_point(n, tau);
  const double leaf = tau * hub / (1.0 + tau * hub);
  CHECK(state.v[0] == doctest::Approx(hub).epsilon(1e-8));
  for (int v = 1; v < n; ++v) CHECK(state.v[static_cast<std::size_t>(v)] == doctest::Approx(leaf).epsilon(1e-8));
  // Frozen oracle values; this instance closes to h = 2.25h/(1 + 2.75h),
  // so hub = 5/11 and leaf = 5/27 exactly.
  CHECK(hub == doctest::Approx(5.0 / 11.0).epsilon(1e-9));
  CHECK(leaf == doctest::Approx(5.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("NIMFA steady state is monotone in tau") {
  const Graph g = Graph::erdos_renyi(8, 0.5, 2);
  std::vector<double> prev(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (double tau : {0.4, 0.6, 0.9, 1.4, 2.2}) {
    const NimfaState state = nimfa_solve(g, tau);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      CHECK(state.v[i] >= prev[i] - 1e-9);
    }
    prev = state.v;
  }
}

TEST_CASE("NIMFA dominance: single node and K_4") {
  const Graph g1 = Graph::from_edges(1, {});
  const NimfaDominance single =
      nimfa_dominance_check(g1, EpidemicParams::from_tau(1.0), std::vector<int>{0}, 3.0, 61);
  CHECK(single.nimfa_vs_sis <= 1e-9);  // NIMFA = exact = e^{-t*}
  CHECK(single.sis_vs_sir <= 1e-9);

  const NimfaDominance k4 = nimfa_dominance_check(Graph::complete(4),
                                                  EpidemicParams::from_tau(0.8),
                                                  std::vector<int>{0}, 4.0, 201);
  CHECK(k4.nimfa_vs_sis <= 1e-9);
  CHECK(k4.sis_vs_sir <= 1e-9);

  // Subcritical cycle: all three curves decay, ordering still holds.
  const NimfaDominance c6 = nimfa_dominance_check(Graph::cycle(6), EpidemicParams::from_tau(0.1),
                                                  std::vector<int>{0}, 4.0, 201);
  CHECK(c6.nimfa_vs_sis <= 1e-9);
  CHECK(c6.sis_vs_sir <= 1e-9);
}

TEST_CASE("estimate_threshold on K_6: both methods bracketed by the bounds") {
  const Graph k6 = Graph::complete(6);
  const double lambda1 = spectral_radius(k6).lambda1;
  const auto grid = default_tau_grid(lambda1, 20);

  const ThresholdEstimate ratio =
      estimate_threshold(k6, grid, ThresholdMethod::Eq12Ratio, QsBackend::ExactQs);
  REQUIRE(ratio.resolved);
  const ThresholdEstimate chi =
      estimate_threshold(k6, grid, ThresholdMethod::SusceptibilityPeak, QsBackend::ExactQs);
  REQUIRE(chi.resolved);

  // Each estimate stays inside the bounds built from its own anchor state.
  for (const ThresholdEstimate* est : {&ratio, &chi}) {
    const double upper = threshold_upper_bound(k6, est->anchor_eps);
    CHECK(est->tau_hat >= 1.0 / lambda1 - 1e-12);
    CHECK(est->tau_hat <= upper * (1.0 + 1e-9));
  }
  // Cross-method consistency within 20 percent.
  CHECK(std::abs(ratio.tau_hat - chi.tau_hat) / ratio.tau_hat <= 0.2);
}

TEST_CASE("estimate_threshold: simulated backend tracks the exact one") {
  const Graph k4 = Graph::complete(4);
  const auto grid = default_tau_grid(3.0, 8);
  const ThresholdEstimate exact =
      estimate_threshold(k4, grid, ThresholdMethod::Eq12Ratio, QsBackend::ExactQs);
  EstimateOptions opt;
  opt.seed = 12;
  const ThresholdEstimate sim =
      estimate_threshold(k4, grid, ThresholdMethod::Eq12Ratio, QsBackend::Simulated, opt);
  REQUIRE(exact.resolved);
  REQUIRE(sim.resolved);
  CHECK(std::abs(sim.tau_hat - exact.tau_hat) / exact.tau_hat <= 0.25);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(sim.curve[i].y_qs - exact.curve[i].y_qs) <= 0.1);
  }
}

TEST_CASE("estimate_threshold: C_6 respects the spectral lower bound") {
  const Graph c6 = Graph::cycle(6);
  const ThresholdEstimate est = estimate_threshold(c6, default_tau_grid(2.0, 16),
                                                   ThresholdMethod::Eq12Ratio, QsBackend::ExactQs);
  REQUIRE(est.resolved);
  CHECK(est.tau_hat >= 0.5 - 1e-12);
}

TEST_CASE("threshold report consistency on regular graphs") {
  for (const Graph& g : {Graph::complete(6), Graph::cycle(6)}) {
    ReportOptions opt;
    opt.eps_points = 6;
    opt.tau_points = 14;
    const ThresholdReport report = threshold_report(g, opt);
    CHECK(report.lower_bound <= report.upper_bound_asymptotic + 1e-12);
    CHECK(report.upper_bound_asymptotic <= report.upper_bound + 1e-12);
    CHECK(report.consistent);
  }
}

TEST_CASE("quadratic interpolation reproduces quadratics exactly") {
  std::vector<double> grid, series;
  for (int k = 0; k <= 10; ++k) {
    grid.push_back(0.2 * k);
    series.push_back(3.0 + 2.0 * grid.back() - 1.5 * grid.back() * grid.back());
  }
  for (double t : {0.31, 0.9, 1.77}) {
    CHECK(quadratic_interpolate(grid, series, t) ==
          doctest::Approx(3.0 + 2.0 * t - 1.5 * t * t).epsilon(1e-12));
  }
}
