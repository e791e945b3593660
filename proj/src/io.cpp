#include "epinet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "epinet/errors.hpp"

namespace epinet {

Graph read_edge_list(std::istream& in) {
  std::string line;
  long n = -1, m = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    long a, b;
    if (!(row >> a)) continue;  // blank or comment-only line
    if (!(row >> b)) throw InvalidArgument("edge list: malformed line: " + line);
    if (n < 0) {
      n = a;
      m = b;
      continue;
    }
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  if (n < 0) throw InvalidArgument("edge list: missing 'N M' header");
  if (static_cast<long>(edges.size()) != m) {
    throw InvalidArgument("edge list: header declares " + std::to_string(m) + " edges, found " +
                          std::to_string(edges.size()));
  }
  return Graph::from_edges(static_cast<int>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open graph file: " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.canonical_edge_list();
}

void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write graph file: " + path);
  write_edge_list(out, g);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_moments_csv(std::ostream& out, const ReducedTrajectory& rt, bool marginals) {
  out << "t_star,y_I,y_R,var_z,e_cut,e_mixed,e_z_cut,s_I";
  if (marginals) {
    for (int v = 0; v < rt.n; ++v) out << ",pI_" << v;
    if (rt.model == Model::SIR) {
      for (int v = 0; v < rt.n; ++v) out << ",pR_" << v;
    }
  }
  out << "\n";
  auto clip = [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
  for (std::size_t k = 0; k < rt.grid.size(); ++k) {
    const MomentRecord& m = rt.moments[k];
    out << format_double(m.t_star) << ',' << format_double(m.y_I) << ',' << format_double(m.y_R)
        << ',' << format_double(m.var_z) << ',' << format_double(m.e_cut) << ','
        << format_double(m.e_mixed) << ',' << format_double(m.e_z_cut) << ','
        << format_double(m.s_I);
    if (marginals) {
      for (int v = 0; v < rt.n; ++v) {
        out << ',' << format_double(clip(rt.p_inf[static_cast<std::size_t>(v)][k]));
      }
      if (rt.model == Model::SIR) {
        for (int v = 0; v < rt.n; ++v) {
          out << ',' << format_double(clip(rt.p_rem[static_cast<std::size_t>(v)][k]));
        }
      }
    }
    out << "\n";
  }
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "t_star,mean_zI,se_zI,var_zI,mean_zR,se_zR,mean_cut,se_cut,mean_mixed,se_mixed,"
         "mean_zcut,se_zcut\n";
  for (std::size_t k = 0; k < stats.grid.size(); ++k) {
    const EnsembleRow& r = stats.rows[k];
    out << format_double(stats.grid[k]) << ',' << format_double(r.mean_zI) << ','
        << format_double(r.se_zI) << ',' << format_double(r.var_zI) << ','
        << format_double(r.mean_zR) << ',' << format_double(r.se_zR) << ','
        << format_double(r.mean_cut) << ',' << format_double(r.se_cut) << ','
        << format_double(r.mean_mixed) << ',' << format_double(r.se_mixed) << ','
        << format_double(r.mean_zcut) << ',' << format_double(r.se_zcut) << "\n";
  }
}

void write_trace_csv(std::ostream& out, const EventTrace& trace) {
  out << "t_star,node,event\n";
  for (const Event& e : trace.events) {
    const char* kind = e.kind == EventKind::Infect ? "infect"
                       : e.kind == EventKind::Cure ? "cure"
                                                   : "remove";
    out << format_double(e.t_star) << ',' << e.node << ',' << kind << "\n";
  }
}

void write_distribution_csv(std::ostream& out, std::span<const double> dist) {
  out << "state_index,probability\n";
  auto clip = [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
  for (std::size_t s = 0; s < dist.size(); ++s) {
    out << s << ',' << format_double(clip(dist[s])) << "\n";
  }
}

void write_threshold_curve_csv(std::ostream& out, std::span<const ThresholdCurvePoint> curve) {
  out << "tau,y_qs,h_tau,chi,eps_link_max\n";
  for (const auto& pt : curve) {
    out << format_double(pt.tau) << ',' << format_double(pt.y_qs) << ','
        << format_double(pt.h_tau) << ',' << format_double(pt.chi) << ','
        << format_double(pt.eps_link_max) << "\n";
  }
}

namespace {

nlohmann::ordered_json json_number(double x) {
  // JSON has no infinity literal; bounds can legitimately be infinite.
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string threshold_report_json(const ThresholdReport& report) {
  nlohmann::ordered_json j;
  j["lambda1"] = json_number(report.lambda1);
  j["lower_bound"] = json_number(report.lower_bound);

  nlohmann::ordered_json eps;
  eps["value"] = report.epsilon_g.value;
  eps["extrapolated"] = report.epsilon_g.extrapolated;
  eps["band"] = report.epsilon_g.band;
  eps["band_reached"] = report.epsilon_g.band_reached;
  eps["limit_converged"] = report.epsilon_g.limit_converged;
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (const auto& pt : report.epsilon_g.sweep) {
    sweep.push_back({{"tau", pt.tau}, {"y_qs", pt.y_qs}, {"eps", pt.eps}});
  }
  eps["sweep"] = std::move(sweep);
  j["epsilon_g"] = std::move(eps);

  j["epsilon_used"] = report.epsilon_used;
  j["upper_bound"] = json_number(report.upper_bound);
  j["upper_bound_asymptotic"] = json_number(report.upper_bound_asymptotic);

  nlohmann::ordered_json tau_hat;
  tau_hat["value"] = json_number(report.tau_hat.tau_hat);
  tau_hat["resolved"] = report.tau_hat.resolved;
  tau_hat["method"] =
      report.tau_hat.method == ThresholdMethod::Eq12Ratio ? "eq12_ratio" : "susceptibility_peak";
  tau_hat["backend"] = report.tau_hat.backend == QsBackend::ExactQs ? "exact_qs" : "qs_simulate";
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto& pt : report.tau_hat.curve) {
    curve.push_back({{"tau", pt.tau},
                     {"y_qs", pt.y_qs},
                     {"h_tau", json_number(pt.h_tau)},
                     {"chi", pt.chi},
                     {"eps_link_max", pt.eps_link_max}});
  }
  tau_hat["curve"] = std::move(curve);
  j["tau_hat"] = std::move(tau_hat);

  j["consistency"] = report.consistent;
  return j.dump(2) + "\n";
}

}  // namespace epinet
