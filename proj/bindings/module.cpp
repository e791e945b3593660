#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "epinet/analysis.hpp"
#include "epinet/gillespie.hpp"
#include "epinet/hierarchy.hpp"
#include "epinet/io.hpp"
#include "epinet/master.hpp"
#include "epinet/quasi_stationary.hpp"
#include "epinet/residuals.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace epinet;

namespace {

Model model_from(const std::string& name) {
  if (name == "sis" || name == "SIS") return Model::SIS;
  if (name == "sir" || name == "SIR") return Model::SIR;
  throw InvalidArgument("model must be 'sis' or 'sir'");
}

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> as_matrix(const std::vector<std::vector<double>>& rows) {
  const py::ssize_t nr = static_cast<py::ssize_t>(rows.size());
  const py::ssize_t nc = nr > 0 ? static_cast<py::ssize_t>(rows[0].size()) : 0;
  py::array_t<double> out({nr, nc});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < nr; ++i)
    for (py::ssize_t j = 0; j < nc; ++j) view(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

py::dict moments_dict(const ReducedTrajectory& rt, bool marginals) {
  const std::size_t pts = rt.grid.size();
  std::vector<double> y_i(pts), y_r(pts), var_z(pts), e_cut(pts), e_mixed(pts), e_z_cut(pts),
      s_i(pts);
  for (std::size_t k = 0; k < pts; ++k) {
    const MomentRecord& m = rt.moments[k];
    y_i[k] = m.y_I;
    y_r[k] = m.y_R;
    var_z[k] = m.var_z;
    e_cut[k] = m.e_cut;
    e_mixed[k] = m.e_mixed;
    e_z_cut[k] = m.e_z_cut;
    s_i[k] = m.s_I;
  }
  py::dict out;
  out["t_star"] = as_array(rt.grid);
  out["y_I"] = as_array(y_i);
  out["y_R"] = as_array(y_r);
  out["var_z"] = as_array(var_z);
  out["e_cut"] = as_array(e_cut);
  out["e_mixed"] = as_array(e_mixed);
  out["e_z_cut"] = as_array(e_z_cut);
  out["s_I"] = as_array(s_i);
  if (marginals) {
    // [node][time] -> (time, node) matrices.
    std::vector<std::vector<double>> pi(rt.grid.size(),
                                        std::vector<double>(static_cast<std::size_t>(rt.n)));
    for (int v = 0; v < rt.n; ++v)
      for (std::size_t k = 0; k < pts; ++k)
        pi[k][static_cast<std::size_t>(v)] = rt.p_inf[static_cast<std::size_t>(v)][k];
    out["pI"] = as_matrix(pi);
    if (rt.model == Model::SIR) {
      std::vector<std::vector<double>> pr(rt.grid.size(),
                                          std::vector<double>(static_cast<std::size_t>(rt.n)));
      for (int v = 0; v < rt.n; ++v)
        for (std::size_t k = 0; k < pts; ++k)
          pr[k][static_cast<std::size_t>(v)] = rt.p_rem[static_cast<std::size_t>(v)][k];
      out["pR"] = as_matrix(pr);
    }
  }
  return out;
}

ReducedTrajectory solve_reduced(const Graph& g, const std::string& model, double tau,
                                const std::vector<int>& init, double t_max, int points,
                                double tol, int max_exact_n) {
  const Model m = model_from(model);
  const EpidemicParams params = EpidemicParams::from_tau(tau);
  const Generator gen =
      m == Model::SIS
          ? build_sis_generator(g, params,
                                max_exact_n > 0 ? max_exact_n : StateSpace::kSisDefaultCap)
          : build_sir_generator(g, params,
                                max_exact_n > 0 ? max_exact_n : StateSpace::kSirDefaultCap);
  const auto grid = uniform_time_grid(t_max, points);
  return reduce_trajectory(gen, g, deterministic_init(gen.space, init), grid, tol);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact and stochastic SIS/SIR epidemics on networks";

  py::register_exception<SizeCapError>(m, "SizeCapError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("lambda1", &SpectralData::lambda1)
      .def_readonly("tolerance", &SpectralData::tolerance)
      .def_readonly("iterations", &SpectralData::iterations);

  py::class_<Graph>(m, "Graph")
      .def_static("from_edges", &Graph::from_edges, "n"_a, "edges"_a)
      .def_static("complete", &Graph::complete, "n"_a)
      .def_static("star", &Graph::star, "n"_a)
      .def_static("cycle", &Graph::cycle, "n"_a)
      .def_static("path", &Graph::path, "n"_a)
      .def_static("erdos_renyi", &Graph::erdos_renyi, "n"_a, "p"_a, "seed"_a)
      .def_static("from_family", &Graph::from_family, "family"_a, "n"_a, "p"_a = 0.0,
                  "seed"_a = 0)
      .def_property_readonly("n", &Graph::num_nodes)
      .def_property_readonly("m", &Graph::num_edges)
      .def("edges", [](const Graph& g) { return g.edges(); })
      .def("degree", &Graph::degree, "v"_a)
      .def("degrees", [](const Graph& g) { return g.degrees(); })
      .def("neighbors", [](const Graph& g, int v) { return g.neighbors(v); }, "v"_a)
      .def("has_edge", &Graph::has_edge, "i"_a, "j"_a)
      .def_property_readonly("d_min", &Graph::min_degree)
      .def_property_readonly("d_max", &Graph::max_degree)
      .def_property_readonly("is_regular", &Graph::is_regular)
      .def("cut_size",
           [](const Graph& g, const std::vector<int>& subset) {
             return g.cut_size(std::span<const int>(subset));
           },
           "subset"_a, "edges with exactly one endpoint in the subset (w^T Q w)")
      .def("mixed_adjacency",
           [](const Graph& g, const std::vector<int>& a, const std::vector<int>& b) {
             return g.mixed_adjacency(std::span<const int>(a), std::span<const int>(b));
           },
           "a"_a, "b"_a, "ordered adjacent pairs (i in a, j in b): w_a^T A w_b")
      .def("canonical_edge_list", &Graph::canonical_edge_list)
      .def("__repr__", [](const Graph& g) {
        return "<epinet.Graph n=" + std::to_string(g.num_nodes()) +
               " m=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("spectral_radius",
        [](const Graph& g, double tol) { return spectral_radius(g, tol); }, "g"_a,
        "tol"_a = 1e-10);

  m.def(
      "exact_solve",
      [](const Graph& g, const std::string& model, double tau, const std::vector<int>& init,
         double t_max, int points, double tol, bool marginals, int max_exact_n) {
        const ReducedTrajectory rt = solve_reduced(g, model, tau, init, t_max, points, tol,
                                                   max_exact_n);
        return moments_dict(rt, marginals);
      },
      "g"_a, "model"_a, "tau"_a, "init"_a, "t_max"_a = 10.0, "points"_a = 201, "tol"_a = 1e-8,
      "marginals"_a = true, "max_exact_n"_a = 0,
      "Exact master-equation solve; returns moment and marginal series. "
      "max_exact_n = 0 keeps the model's default size cap.");

  m.def(
      "residual_suite",
      [](const Graph& g, const std::string& model, double tau, const std::vector<int>& init,
         double t_max, double step, double tol) {
        const int points = static_cast<int>(t_max / step) + 1;
        const ReducedTrajectory rt = solve_reduced(g, model, tau, init, t_max, points, tol, 0);
        py::dict out;
        const GoverningResidual gov = residual_governing(rt, g);
        out["governing_infection"] = gov.infection;
        out["governing_removal"] = gov.removal;
        const PrevalenceOdeResidual prev = residual_prevalence_ode(rt);
        out["prevalence_ode"] = prev.max_ode();
        out["form_agreement"] = prev.form_agreement;
        if (model_from(model) == Model::SIS) {
          const VarianceOdeResidual var = residual_variance_ode(rt);
          out["variance_ode"] = var.variance;
          out["pair_sum_ode"] = var.pair_sum;
        }
        return out;
      },
      "g"_a, "model"_a, "tau"_a, "init"_a, "t_max"_a = 2.0, "step"_a = 1e-3, "tol"_a = 1e-8,
      "Finite-difference residuals of the governing equations on one graph.");

  m.def(
      "quasi_stationary",
      [](const Graph& g, double tau, double tol) {
        const Generator gen = build_sis_generator(g, EpidemicParams::from_tau(tau));
        const QuasiStationary qs = quasi_stationary(gen, tol);
        const StateObservables obs(g, gen.space);
        py::dict out;
        out["weights"] = as_array(qs.weights);
        out["decay_rate"] = qs.decay_rate;
        out["y_qs"] = qs_prevalence(qs, obs);
        out["e_cut"] = qs_expected_cut(qs, obs);
        out["chi"] = qs_susceptibility(qs, obs);
        out["eps_link_max"] = qs_max_link_conditional(qs, g);
        return out;
      },
      "g"_a, "tau"_a, "tol"_a = 1e-13,
      "Quasi-stationary distribution of the SIS chain with summary observables.");

  m.def(
      "epsilon_g",
      [](const Graph& g, std::vector<double> taus, int points, double tol) {
        if (taus.empty()) {
          taus = default_epsilon_sweep(spectral_radius(g).lambda1, points);
        }
        const EpsilonEstimate est = epsilon_g(g, taus, tol);
        py::dict out;
        std::vector<double> t, y, e;
        for (const auto& pt : est.sweep) {
          t.push_back(pt.tau);
          y.push_back(pt.y_qs);
          e.push_back(pt.eps);
        }
        out["tau"] = as_array(t);
        out["y_qs"] = as_array(y);
        out["eps"] = as_array(e);
        out["value"] = est.value;
        out["extrapolated"] = est.extrapolated;
        out["band"] = est.band;
        out["band_reached"] = est.band_reached;
        return out;
      },
      "g"_a, "taus"_a = std::vector<double>{}, "points"_a = 8, "tol"_a = 1e-12,
      "Max conditional link infection probability toward vanishing prevalence.");

  m.def(
      "simulate",
      [](const Graph& g, const std::string& model, double tau, const std::vector<int>& init,
         double horizon, std::uint64_t seed) {
        const EventTrace trace =
            simulate(model_from(model), g, EpidemicParams::from_tau(tau), init, horizon, seed);
        std::vector<double> times;
        std::vector<int> nodes, kinds;
        for (const Event& e : trace.events) {
          times.push_back(e.t_star);
          nodes.push_back(e.node);
          kinds.push_back(static_cast<int>(e.kind));
        }
        py::dict out;
        out["t_star"] = as_array(times);
        out["node"] = py::cast(nodes);
        out["kind"] = py::cast(kinds);  // 0 infect, 1 cure, 2 remove
        return out;
      },
      "g"_a, "model"_a, "tau"_a, "init"_a, "horizon"_a, "seed"_a,
      "Event-driven Gillespie simulation; returns the event trace.");

  m.def(
      "ensemble",
      [](const Graph& g, const std::string& model, double tau, const std::vector<int>& init,
         double horizon, int runs, const std::vector<double>& grid, std::uint64_t master_seed,
         int threads) {
        const EnsembleStats stats = ensemble(model_from(model), g, EpidemicParams::from_tau(tau),
                                             init, horizon, runs, grid, master_seed, threads);
        py::dict out;
        out["t_star"] = as_array(stats.grid);
        std::vector<double> col(stats.rows.size());
        auto emit = [&](const char* name, auto getter) {
          for (std::size_t k = 0; k < stats.rows.size(); ++k) col[k] = getter(stats.rows[k]);
          out[name] = as_array(col);
        };
        emit("mean_zI", [](const EnsembleRow& r) { return r.mean_zI; });
        emit("se_zI", [](const EnsembleRow& r) { return r.se_zI; });
        emit("var_zI", [](const EnsembleRow& r) { return r.var_zI; });
        emit("mean_zR", [](const EnsembleRow& r) { return r.mean_zR; });
        emit("se_zR", [](const EnsembleRow& r) { return r.se_zR; });
        emit("mean_cut", [](const EnsembleRow& r) { return r.mean_cut; });
        emit("se_cut", [](const EnsembleRow& r) { return r.se_cut; });
        emit("mean_mixed", [](const EnsembleRow& r) { return r.mean_mixed; });
        emit("se_mixed", [](const EnsembleRow& r) { return r.se_mixed; });
        emit("mean_zcut", [](const EnsembleRow& r) { return r.mean_zcut; });
        emit("se_zcut", [](const EnsembleRow& r) { return r.se_zcut; });
        out["runs"] = stats.runs;
        return out;
      },
      "g"_a, "model"_a, "tau"_a, "init"_a, "horizon"_a, "runs"_a, "grid"_a, "master_seed"_a,
      "threads"_a = 1, "Ensemble statistics of the Theorem-1 observables.");

  m.def(
      "qs_simulate",
      [](const Graph& g, double tau, double burn_in, int samples, std::uint64_t seed) {
        const QsSimulateResult r =
            qs_simulate(g, EpidemicParams::from_tau(tau), burn_in, samples, seed);
        py::dict out;
        out["y_qs"] = r.y_qs;
        out["y_qs_se"] = r.y_qs_se;
        out["mean_cut"] = r.mean_cut;
        out["max_link_conditional"] = r.max_link_conditional;
        out["susceptibility"] = r.susceptibility;
        out["restarts"] = r.restarts;
        out["low_occupancy"] = r.low_occupancy;
        return out;
      },
      "g"_a, "tau"_a, "burn_in"_a = 50.0, "samples"_a = 400, "seed"_a = 1,
      "Quasi-stationary restart simulation (SIS).");

  m.def(
      "peak_prevalence",
      [](const std::vector<double>& grid, const std::vector<double>& y) {
        const PeakResult peak = peak_prevalence(grid, y);
        return py::make_tuple(peak.t_peak, peak.y_max, peak.boundary);
      },
      "t_star"_a, "y"_a, "(t_peak, y_max, boundary) with parabolic refinement");

  m.def(
      "nimfa_solve",
      [](const Graph& g, double tau, double tol) {
        const NimfaState state = nimfa_solve(g, tau, tol);
        py::dict out;
        out["v"] = as_array(state.v);
        out["residual"] = state.residual;
        out["iterations"] = state.iterations;
        return out;
      },
      "g"_a, "tau"_a, "tol"_a = 1e-12, "NIMFA steady state.");

  m.def(
      "nimfa_trajectory",
      [](const Graph& g, double tau, const std::vector<double>& v0,
         const std::vector<double>& grid, double tol) {
        return as_matrix(nimfa_trajectory(g, tau, v0, grid, tol));
      },
      "g"_a, "tau"_a, "v0"_a, "grid"_a, "tol"_a = 1e-10,
      "Transient NIMFA solution, shape (time, node).");

  m.def(
      "nimfa_dominance",
      [](const Graph& g, double tau, const std::vector<int>& init, double horizon, int points,
         double tol) {
        const NimfaDominance d =
            nimfa_dominance_check(g, EpidemicParams::from_tau(tau), init, horizon, points, tol);
        return py::make_tuple(d.nimfa_vs_sis, d.sis_vs_sir);
      },
      "g"_a, "tau"_a, "init"_a, "horizon"_a = 4.0, "points"_a = 201, "tol"_a = 1e-10,
      "(max Pr_SIS - v_NIMFA, max Pr_SIR - Pr_SIS) ordering violations.");

  m.def("threshold_lower_bound", &threshold_lower_bound, "g"_a);
  m.def("threshold_upper_bound", &threshold_upper_bound, "g"_a, "eps"_a);

  m.def(
      "estimate_threshold",
      [](const Graph& g, std::vector<double> taus, const std::string& method,
         const std::string& backend, int points, std::uint64_t seed) {
        if (taus.empty()) taus = default_tau_grid(spectral_radius(g).lambda1, points);
        EstimateOptions opt;
        opt.seed = seed;
        const ThresholdEstimate est = estimate_threshold(
            g, taus,
            method == "susceptibility_peak" ? ThresholdMethod::SusceptibilityPeak
                                            : ThresholdMethod::Eq12Ratio,
            backend == "qs_simulate" ? QsBackend::Simulated : QsBackend::ExactQs, opt);
        py::dict out;
        out["tau_hat"] = est.tau_hat;
        out["resolved"] = est.resolved;
        std::vector<double> tau, y, h, chi, eps;
        for (const auto& pt : est.curve) {
          tau.push_back(pt.tau);
          y.push_back(pt.y_qs);
          h.push_back(pt.h_tau);
          chi.push_back(pt.chi);
          eps.push_back(pt.eps_link_max);
        }
        out["tau"] = as_array(tau);
        out["y_qs"] = as_array(y);
        out["h_tau"] = as_array(h);
        out["chi"] = as_array(chi);
        out["eps_link_max"] = as_array(eps);
        return out;
      },
      "g"_a, "taus"_a = std::vector<double>{}, "method"_a = "eq12_ratio",
      "backend"_a = "exact_qs", "points"_a = 20, "seed"_a = 1,
      "Finite-N threshold estimate with the full diagnostic curve.");

  m.def(
      "threshold_report",
      [](const Graph& g, int eps_points, int tau_points, const std::string& method,
         const std::string& backend) {
        ReportOptions opt;
        opt.eps_points = eps_points;
        opt.tau_points = tau_points;
        opt.method = method == "susceptibility_peak" ? ThresholdMethod::SusceptibilityPeak
                                                     : ThresholdMethod::Eq12Ratio;
        opt.backend = backend == "qs_simulate" ? QsBackend::Simulated : QsBackend::ExactQs;
        const ThresholdReport report = threshold_report(g, opt);
        py::dict out;
        out["lambda1"] = report.lambda1;
        out["lower_bound"] = report.lower_bound;
        out["epsilon_g"] = report.epsilon_g.value;
        out["epsilon_g_extrapolated"] = report.epsilon_g.extrapolated;
        out["epsilon_used"] = report.epsilon_used;
        out["upper_bound"] = report.upper_bound;
        out["upper_bound_asymptotic"] = report.upper_bound_asymptotic;
        out["tau_hat"] = report.tau_hat.tau_hat;
        out["tau_hat_resolved"] = report.tau_hat.resolved;
        out["consistency"] = report.consistent;
        out["json"] = threshold_report_json(report);
        return out;
      },
      "g"_a, "eps_points"_a = 8, "tau_points"_a = 20, "method"_a = "eq12_ratio",
      "backend"_a = "exact_qs", "Bundled threshold bounds report.");
}
