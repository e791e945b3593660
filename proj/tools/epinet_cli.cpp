// epinet: exact and stochastic SIS/SIR epidemics on networks.
//
// Subcommands: gen, exact, mc, bounds, sweep, verify. Exit codes: 0 success,
// 2 usage error, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epinet/analysis.hpp"
#include "epinet/errors.hpp"
#include "epinet/gillespie.hpp"
#include "epinet/hierarchy.hpp"
#include "epinet/io.hpp"
#include "epinet/master.hpp"
#include "epinet/residuals.hpp"
#include "epinet/rng.hpp"

namespace {

using namespace epinet;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct GraphSource {
  std::string file;
  std::string family;
  int n = 0;
  double p = 0.5;
  std::uint64_t seed = 0;

  void add_flags(CLI::App* cmd) {
    auto* file_opt = cmd->add_option("--graph", file, "edge-list file (first line 'N M')");
    auto* fam_opt = cmd->add_option("--family", family,
                                    "graph family: complete|star|cycle|path|erdos_renyi");
    cmd->add_option("--n", n, "node count (family graphs)");
    cmd->add_option("--p", p, "edge probability (erdos_renyi)");
    cmd->add_option("--graph-seed", seed, "edge-set seed (erdos_renyi)");
    file_opt->excludes(fam_opt);
  }

  Graph build() const {
    if (!file.empty()) return read_edge_list_file(file);
    if (family.empty()) throw InvalidArgument("need exactly one of --graph or --family");
    if (n < 1) throw InvalidArgument("--family needs --n");
    return Graph::from_family(family, n, p, seed);
  }
};

struct RateSpec {
  double tau = 0.0;
  double beta = 0.0;
  double delta = 0.0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--tau", tau, "effective infection rate beta/delta (implies delta = 1)");
    cmd->add_option("--beta", beta, "per-link infection rate");
    cmd->add_option("--delta", delta, "per-node curing rate");
  }

  EpidemicParams build() const {
    if (tau > 0.0) {
      if (beta > 0.0 || delta > 0.0) {
        throw InvalidArgument("--tau conflicts with --beta/--delta");
      }
      return EpidemicParams::from_tau(tau);
    }
    if (beta > 0.0 && delta > 0.0) return EpidemicParams(beta, delta);
    throw InvalidArgument("need --tau or both --beta and --delta");
  }
};

Model parse_model(const std::string& name) {
  if (name == "sis") return Model::SIS;
  if (name == "sir") return Model::SIR;
  throw InvalidArgument("--model must be sis or sir");
}

// "0,3,5" or "random:k:seed"; default seeds node 0.
std::vector<int> parse_init(const std::string& spec, int n) {
  std::vector<int> nodes;
  if (spec.rfind("random:", 0) == 0) {
    const auto rest = spec.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw InvalidArgument("init spec: random:k:seed");
    const int k = std::stoi(rest.substr(0, colon));
    const std::uint64_t seed = std::stoull(rest.substr(colon + 1));
    if (k < 0 || k > n) throw InvalidArgument("init spec: k out of range");
    // Partial Fisher-Yates over 0..n-1.
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    Xoshiro256 rng(seed);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    nodes.assign(pool.begin(), pool.begin() + k);
    return nodes;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) nodes.push_back(std::stoi(tok));
  }
  return nodes;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open output file: " + path);
  return out;
}

int threads_from(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("EPINET_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// ---------------------------------------------------------------------------

int run_gen(const GraphSource& src, const std::string& out_path) {
  const Graph g = src.build();
  write_edge_list_file(out_path, g);
  std::printf("wrote %s: %d nodes, %d edges\n", out_path.c_str(), g.num_nodes(), g.num_edges());
  return 0;
}

int run_exact(const GraphSource& src, const RateSpec& rates, const std::string& model_name,
              const std::string& init_spec, double t_max, int points, double tol, bool marginals,
              const std::string& out_path, const std::string& dist_out, int max_exact_n) {
  const Graph g = src.build();
  const EpidemicParams params = rates.build();
  const Model model = parse_model(model_name);
  const auto init_nodes = parse_init(init_spec, g.num_nodes());

  const Generator gen =
      model == Model::SIS
          ? build_sis_generator(g, params,
                                max_exact_n > 0 ? max_exact_n : StateSpace::kSisDefaultCap)
          : build_sir_generator(g, params,
                                max_exact_n > 0 ? max_exact_n : StateSpace::kSirDefaultCap);
  const auto init = deterministic_init(gen.space, init_nodes);
  const auto grid = uniform_time_grid(t_max, points);
  const ReducedTrajectory rt = reduce_trajectory(gen, g, init, grid, tol);

  auto out = open_output(out_path);
  write_moments_csv(out, rt, marginals);

  if (!dist_out.empty()) {
    // Snapshot of the full distribution at the final grid time.
    std::vector<double> last;
    integrate_master(gen, init, grid, tol,
                     [&](std::size_t k, std::span<const double> dist) {
                       if (k + 1 == grid.size()) last.assign(dist.begin(), dist.end());
                     });
    auto dout = open_output(dist_out);
    write_distribution_csv(dout, last);
  }
  return 0;
}

int run_mc(const GraphSource& src, const RateSpec& rates, const std::string& model_name,
           const std::string& init_spec, double t_max, int points, int runs,
           std::uint64_t master_seed, int threads, const std::string& out_path,
           const std::string& trace_out) {
  const Graph g = src.build();
  const EpidemicParams params = rates.build();
  const Model model = parse_model(model_name);
  const auto init_nodes = parse_init(init_spec, g.num_nodes());
  const auto grid = uniform_time_grid(t_max, points);

  if (!trace_out.empty()) {
    const EventTrace trace = simulate(model, g, params, init_nodes, t_max, master_seed);
    auto tout = open_output(trace_out);
    write_trace_csv(tout, trace);
  }
  const EnsembleStats stats =
      ensemble(model, g, params, init_nodes, t_max, runs, grid, master_seed, threads);
  auto out = open_output(out_path);
  write_ensemble_csv(out, stats);
  return 0;
}

int run_bounds(const GraphSource& src, const std::string& out_path, int eps_points,
               int tau_points, const std::string& method, const std::string& backend,
               std::uint64_t seed) {
  const Graph g = src.build();
  ReportOptions opt;
  opt.eps_points = eps_points;
  opt.tau_points = tau_points;
  opt.method = method == "susceptibility_peak" ? ThresholdMethod::SusceptibilityPeak
                                               : ThresholdMethod::Eq12Ratio;
  opt.backend = backend == "qs_simulate" ? QsBackend::Simulated : QsBackend::ExactQs;
  opt.estimate.seed = seed;
  const ThresholdReport report = threshold_report(g, opt);

  const std::string json = threshold_report_json(report);
  if (out_path.empty()) {
    std::fputs(json.c_str(), stdout);
  } else {
    auto out = open_output(out_path);
    out << json;
  }
  if (!(report.lower_bound <= report.upper_bound)) return kExitNumerical;
  return 0;
}

int run_sweep(const GraphSource& src, const std::string& out_path, double tau_min, double tau_max,
              int points, const std::string& backend, std::uint64_t seed) {
  const Graph g = src.build();
  const double lambda1 = spectral_radius(g).lambda1;
  std::vector<double> taus;
  if (tau_min > 0.0 && tau_max > tau_min) {
    taus.resize(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
      taus[static_cast<std::size_t>(k)] = tau_min + (tau_max - tau_min) * k / (points - 1);
    }
  } else {
    taus = default_tau_grid(lambda1, points);
  }
  EstimateOptions opt;
  opt.seed = seed;
  const ThresholdEstimate est =
      estimate_threshold(g, taus, ThresholdMethod::Eq12Ratio,
                         backend == "qs_simulate" ? QsBackend::Simulated : QsBackend::ExactQs, opt);
  auto out = open_output(out_path);
  write_threshold_curve_csv(out, est.curve);
  return 0;
}

struct VerifyRow {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

int run_verify(const GraphSource& src, const RateSpec& rates, double t_max, double step,
               double tol) {
  const Graph g = src.build();
  const EpidemicParams params = rates.build();
  const int n = g.num_nodes();
  std::vector<int> seed_node = {0};

  const int points = static_cast<int>(t_max / step) + 1;
  const auto grid = uniform_time_grid(t_max, points);

  const Generator sis = build_sis_generator(g, params);
  const Generator sir = build_sir_generator(g, params);
  const auto rt_sis = reduce_trajectory(sis, g, deterministic_init(sis.space, seed_node), grid, tol);
  const auto rt_sir = reduce_trajectory(sir, g, deterministic_init(sir.space, seed_node), grid, tol);

  std::vector<VerifyRow> rows;
  auto check = [&rows](const std::string& name, double value, double tolerance) {
    rows.push_back({name, value, tolerance, value <= tolerance});
  };

  const GoverningResidual gov_sis = residual_governing(rt_sis, g);
  const GoverningResidual gov_sir = residual_governing(rt_sir, g);
  check("governing_sis_infection", gov_sis.infection, 1e-5);
  check("governing_sir_infection", gov_sir.infection, 1e-5);
  check("governing_sir_removal", gov_sir.removal, 1e-5);

  const PrevalenceOdeResidual prev_sis = residual_prevalence_ode(rt_sis);
  const PrevalenceOdeResidual prev_sir = residual_prevalence_ode(rt_sir);
  check("prevalence_ode_sis", prev_sis.max_ode(), 1e-5);
  check("prevalence_ode_sir", prev_sir.max_ode(), 1e-5);
  check("laplacian_vs_degree_form_sis", prev_sis.form_agreement, 1e-12);
  check("laplacian_vs_degree_form_sir", prev_sir.form_agreement, 1e-12);

  const VarianceOdeResidual var_sis = residual_variance_ode(rt_sis);
  check("variance_ode_sis", var_sis.variance, 1e-5);
  check("pair_sum_ode_sis", var_sis.pair_sum, 1e-5 * n * n);

  // Appendix link-sum identity, exhaustively when the subset count is small.
  if (n <= 16) {
    long worst = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const long cut = g.cut_size(s);
      const long alt = g.degree_sum(s) - g.internal_adjacency(s);
      long direct = 0;
      for (auto [u, v] : g.edges()) {
        direct += ((s >> u) & 1) != ((s >> v) & 1);
      }
      worst = std::max({worst, std::labs(cut - alt), std::labs(cut - direct)});
    }
    check("laplacian_link_sum_identity", static_cast<double>(worst), 0.0);
  }

  // SIR <= SIS dominance and NIMFA dominance on the same seed.
  double sir_over_sis = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sir_over_sis = std::max(sir_over_sis, rt_sir.p_inf[uj][k] - rt_sis.p_inf[uj][k]);
    }
  }
  check("sir_below_sis", sir_over_sis, 1e-9);

  std::vector<double> v0(static_cast<std::size_t>(n), 0.0);
  v0[0] = 1.0;
  const auto nimfa = nimfa_trajectory(g, params.tau, v0, grid, tol);
  double sis_over_nimfa = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sis_over_nimfa = std::max(sis_over_nimfa, rt_sis.p_inf[uj][k] - nimfa[k][uj]);
    }
  }
  check("nimfa_above_sis", sis_over_nimfa, 1e-9);

  // Bound ordering 1/d_max <= 1/lambda1 <= tau_c upper machinery.
  const double lambda1 = spectral_radius(g).lambda1;
  check("one_over_dmax_below_lower_bound",
        g.num_edges() > 0 ? 1.0 / g.max_degree() - 1.0 / lambda1 : 0.0, 1e-12);

  bool all_pass = true;
  std::printf("%-34s %13s %12s  %s\n", "check", "residual", "tolerance", "status");
  for (const auto& row : rows) {
    all_pass = all_pass && row.pass;
    std::printf("%-34s %13.6e %12.1e  %s\n", row.name.c_str(), row.value, row.tolerance,
                row.pass ? "PASS" : "FAIL");
  }
  std::printf("%s\n", all_pass ? "OVERALL PASS" : "OVERALL FAIL");
  return all_pass ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and stochastic SIS/SIR epidemics on networks"};
  app.require_subcommand(1);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a graph and write its edge list");
  GraphSource gen_src;
  gen_src.add_flags(gen_cmd);
  std::string gen_out;
  gen_cmd->add_option("-o,--out", gen_out, "output edge-list path")->required();

  // exact
  auto* exact_cmd = app.add_subcommand("exact", "exact master-equation solve");
  GraphSource exact_src;
  RateSpec exact_rates;
  exact_src.add_flags(exact_cmd);
  exact_rates.add_flags(exact_cmd);
  std::string exact_model = "sis", exact_init = "0", exact_out, exact_dist_out;
  double exact_tmax = 10.0, exact_tol = 1e-8;
  int exact_points = 200, exact_cap = 0;  // 0: model default
  bool exact_marginals = false;
  exact_cmd->add_option("--model", exact_model, "sis|sir");
  exact_cmd->add_option("--init", exact_init, "seed nodes '0,3' or random:k:seed");
  exact_cmd->add_option("--tmax", exact_tmax, "horizon in scaled time");
  exact_cmd->add_option("--points", exact_points, "grid points");
  exact_cmd->add_option("--tol", exact_tol, "integrator tolerance");
  exact_cmd->add_flag("--marginals", exact_marginals, "append per-node marginal columns");
  exact_cmd->add_option("--max-exact-n", exact_cap,
                        "override the exact-solver size cap (default 14 SIS / 9 SIR)");
  exact_cmd->add_option("-o,--out", exact_out, "moments CSV path")->required();
  exact_cmd->add_option("--dist-out", exact_dist_out, "distribution snapshot CSV at tmax");

  // mc
  auto* mc_cmd = app.add_subcommand("mc", "Gillespie ensemble simulation");
  GraphSource mc_src;
  RateSpec mc_rates;
  mc_src.add_flags(mc_cmd);
  mc_rates.add_flags(mc_cmd);
  std::string mc_model = "sis", mc_init = "0", mc_out, mc_trace_out;
  double mc_tmax = 10.0;
  int mc_points = 50, mc_runs = 1000, mc_threads = 0;
  std::uint64_t mc_seed = 1;
  mc_cmd->add_option("--model", mc_model, "sis|sir");
  mc_cmd->add_option("--init", mc_init, "seed nodes '0,3' or random:k:seed");
  mc_cmd->add_option("--tmax", mc_tmax, "horizon in scaled time");
  mc_cmd->add_option("--points", mc_points, "grid points");
  mc_cmd->add_option("--runs", mc_runs, "ensemble size");
  mc_cmd->add_option("--seed", mc_seed, "master seed");
  mc_cmd->add_option("--threads", mc_threads, "worker threads (or EPINET_THREADS)");
  mc_cmd->add_option("-o,--out", mc_out, "ensemble CSV path")->required();
  mc_cmd->add_option("--trace-out", mc_trace_out, "single-run event trace CSV");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "threshold bounds report (JSON)");
  GraphSource bounds_src;
  bounds_src.add_flags(bounds_cmd);
  std::string bounds_out, bounds_method = "eq12_ratio", bounds_backend = "exact_qs";
  int bounds_eps_points = 8, bounds_tau_points = 20;
  std::uint64_t bounds_seed = 1;
  bounds_cmd->add_option("-o,--out", bounds_out, "report JSON path (default stdout)");
  bounds_cmd->add_option("--eps-points", bounds_eps_points, "epsilon sweep points");
  bounds_cmd->add_option("--tau-points", bounds_tau_points, "threshold grid points");
  bounds_cmd->add_option("--method", bounds_method, "eq12_ratio|susceptibility_peak");
  bounds_cmd->add_option("--backend", bounds_backend, "exact_qs|qs_simulate");
  bounds_cmd->add_option("--seed", bounds_seed, "seed (qs_simulate backend)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "threshold curve over a tau grid (CSV)");
  GraphSource sweep_src;
  sweep_src.add_flags(sweep_cmd);
  std::string sweep_out, sweep_backend = "exact_qs";
  double sweep_tau_min = 0.0, sweep_tau_max = 0.0;
  int sweep_points = 20;
  std::uint64_t sweep_seed = 1;
  sweep_cmd->add_option("-o,--out", sweep_out, "curve CSV path")->required();
  sweep_cmd->add_option("--tau-min", sweep_tau_min, "grid start (default 0.8/lambda1)");
  sweep_cmd->add_option("--tau-max", sweep_tau_max, "grid end (default 3/lambda1)");
  sweep_cmd->add_option("--points", sweep_points, "grid points");
  sweep_cmd->add_option("--backend", sweep_backend, "exact_qs|qs_simulate");
  sweep_cmd->add_option("--seed", sweep_seed, "seed (qs_simulate backend)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "residual and dominance suite on one graph");
  GraphSource verify_src;
  RateSpec verify_rates;
  verify_src.add_flags(verify_cmd);
  verify_rates.add_flags(verify_cmd);
  double verify_tmax = 2.0, verify_step = 1e-3, verify_tol = 1e-8;
  verify_cmd->add_option("--tmax", verify_tmax, "horizon in scaled time");
  verify_cmd->add_option("--step", verify_step, "grid step for finite differences");
  verify_cmd->add_option("--tol", verify_tol, "integrator tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return run_gen(gen_src, gen_out);
    if (exact_cmd->parsed()) {
      return run_exact(exact_src, exact_rates, exact_model, exact_init, exact_tmax, exact_points,
                       exact_tol, exact_marginals, exact_out, exact_dist_out, exact_cap);
    }
    if (mc_cmd->parsed()) {
      return run_mc(mc_src, mc_rates, mc_model, mc_init, mc_tmax, mc_points, mc_runs, mc_seed,
                    threads_from(mc_threads), mc_out, mc_trace_out);
    }
    if (bounds_cmd->parsed()) {
      return run_bounds(bounds_src, bounds_out, bounds_eps_points, bounds_tau_points,
                        bounds_method, bounds_backend, bounds_seed);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_src, sweep_out, sweep_tau_min, sweep_tau_max, sweep_points,
                       sweep_backend, sweep_seed);
    }
    if (verify_cmd->parsed()) {
      return run_verify(verify_src, verify_rates, verify_tmax, verify_step, verify_tol);
    }
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const SizeCapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
