#include "epinet/quasi_stationary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "epinet/errors.hpp"

namespace epinet {

QuasiStationary quasi_stationary(const Generator& gen, double tol, int max_iterations) {
  if (gen.space.model() != Model::SIS) {
    throw InvalidArgument("quasi_stationary: SIS generators only");
  }
  if (!(tol > 0.0)) throw InvalidArgument("quasi_stationary: tol must be positive");
  const std::uint64_t size = gen.size();
  if (size < 2) throw InvalidArgument("quasi_stationary: no transient states");

  double c = 0.0;
  for (std::uint64_t s = 1; s < size; ++s) c = std::max(c, -gen.diag[s]);
  c = c > 0.0 ? 1.0001 * c : 1.0;
  const double inv_c = 1.0 / c;

  // Left power iteration on I + G_sub/c over the transient states 1..size-1;
  // index 0 (all susceptible) stays zero and absorbs leaked mass, which is
  // discarded by the normalization.
  std::vector<double> q(size, 0.0), next(size, 0.0);
  const double uniform = 1.0 / static_cast<double>(size - 1);
  for (std::uint64_t s = 1; s < size; ++s) q[s] = uniform;

  double decay = 0.0;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t s = 1; s < size; ++s) {
      const double mass = q[s];
      if (mass == 0.0) continue;
      next[s] += mass * (1.0 + gen.diag[s] * inv_c);
      const std::uint64_t end = gen.row_ptr[s + 1];
      for (std::uint64_t k = gen.row_ptr[s]; k < end; ++k) {
        next[gen.col[k]] += mass * gen.rate[k] * inv_c;
      }
    }
    double kept = 0.0;
    for (std::uint64_t s = 1; s < size; ++s) kept += next[s];
    if (kept <= 0.0) {
      throw ConvergenceError("quasi_stationary: all mass absorbed (degenerate chain)");
    }
    const double inv_kept = 1.0 / kept;
    double diff = 0.0;
    for (std::uint64_t s = 1; s < size; ++s) {
      next[s] *= inv_kept;
      diff += std::abs(next[s] - q[s]);
    }
    next[0] = 0.0;
    q.swap(next);
    // Perron value of P is kept, so the QS decay rate is c (1 - kept).
    decay = c * (1.0 - kept) / gen.params.delta;
    if (diff <= tol) {
      return QuasiStationary{std::move(q), decay, iter, tol};
    }
  }
  throw ConvergenceError("quasi_stationary: power iteration did not converge");
}

namespace {

double expectation(const QuasiStationary& qs, const StateObservables& obs,
                   double (*f)(const StateObservables&, std::uint64_t)) {
  double acc = 0.0;
  for (std::uint64_t s = 0; s < qs.weights.size(); ++s) {
    if (qs.weights[s] != 0.0) acc += qs.weights[s] * f(obs, s);
  }
  return acc;
}

}  // namespace

double qs_prevalence(const QuasiStationary& qs, const StateObservables& obs) {
  const double n = obs.num_nodes();
  return expectation(qs, obs, [](const StateObservables& o, std::uint64_t s) {
           return static_cast<double>(o.infected_count(s));
         }) /
         n;
}

double qs_expected_cut(const QuasiStationary& qs, const StateObservables& obs) {
  return expectation(qs, obs, [](const StateObservables& o, std::uint64_t s) {
    return static_cast<double>(o.cut(s));
  });
}

double qs_variance_z(const QuasiStationary& qs, const StateObservables& obs) {
  const double n = obs.num_nodes();
  double mean = 0.0, second = 0.0;
  for (std::uint64_t s = 0; s < qs.weights.size(); ++s) {
    const double w = qs.weights[s];
    if (w == 0.0) continue;
    const double z = obs.infected_count(s) / n;
    mean += w * z;
    second += w * z * z;
  }
  return second - mean * mean;
}

double qs_susceptibility(const QuasiStationary& qs, const StateObservables& obs) {
  const double y = qs_prevalence(qs, obs);
  if (y <= 0.0) return 0.0;
  return obs.num_nodes() * qs_variance_z(qs, obs) / y;
}

double qs_max_link_conditional(const QuasiStationary& qs, const Graph& g) {
  const int n = g.num_nodes();
  std::vector<double> p_node(static_cast<std::size_t>(n), 0.0);
  std::vector<double> p_pair(g.edges().size(), 0.0);
  for (std::uint64_t s = 0; s < qs.weights.size(); ++s) {
    const double w = qs.weights[s];
    if (w == 0.0) continue;
    for (std::uint64_t m = s; m != 0; m &= m - 1) {
      p_node[static_cast<std::size_t>(std::countr_zero(m))] += w;
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const auto [u, v] = g.edges()[e];
      if (((s >> u) & 1) && ((s >> v) & 1)) p_pair[e] += w;
    }
  }
  double best = 0.0;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto [u, v] = g.edges()[e];
    if (p_node[static_cast<std::size_t>(v)] > 0.0) {
      best = std::max(best, p_pair[e] / p_node[static_cast<std::size_t>(v)]);
    }
    if (p_node[static_cast<std::size_t>(u)] > 0.0) {
      best = std::max(best, p_pair[e] / p_node[static_cast<std::size_t>(u)]);
    }
  }
  return best;
}

EpsilonEstimate epsilon_g(const Graph& g, std::span<const double> tau_sequence, double tol) {
  if (tau_sequence.empty()) throw InvalidArgument("epsilon_g: empty tau sequence");
  for (std::size_t i = 1; i < tau_sequence.size(); ++i) {
    if (!(tau_sequence[i] < tau_sequence[i - 1])) {
      throw InvalidArgument("epsilon_g: tau sequence must be strictly decreasing");
    }
  }
  if (g.num_edges() == 0) throw InvalidArgument("epsilon_g: graph has no links");
  const double lower = 1.0 / spectral_radius(g).lambda1;
  if (!(tau_sequence.back() > lower)) {
    throw InvalidArgument("epsilon_g: every tau must stay above the lower bound 1/lambda1");
  }

  // Components with links get their own QS restriction; singleton or
  // edgeless components never carry a conditional.
  struct Component {
    Graph graph;
    int size;
  };
  std::vector<Component> comps;
  for (const auto& nodes : g.connected_components()) {
    Graph sub = g.induced_subgraph(nodes);
    if (sub.num_edges() > 0) comps.push_back({std::move(sub), static_cast<int>(nodes.size())});
  }

  EpsilonEstimate est;
  est.band = 2.0 / static_cast<double>(g.num_nodes());
  for (double tau : tau_sequence) {
    const EpidemicParams params = EpidemicParams::from_tau(tau);
    double eps = 0.0;
    double infected_nodes = 0.0;
    for (const auto& comp : comps) {
      const Generator gen = build_sis_generator(comp.graph, params);
      const QuasiStationary qs = quasi_stationary(gen, tol);
      const StateObservables obs(comp.graph, gen.space);
      eps = std::max(eps, qs_max_link_conditional(qs, comp.graph));
      infected_nodes += qs_prevalence(qs, obs) * comp.size;
    }
    est.sweep.push_back({tau, infected_nodes / g.num_nodes(), eps});
  }

  // Headline value: eps at the smallest tau whose QS prevalence still sits
  // in the band; plus the y -> 0 least-squares extrapolation over the
  // in-band points as a diagnostic.
  double xs = 0.0, ys = 0.0, xx = 0.0, xy = 0.0;
  int in_band = 0;
  for (const auto& pt : est.sweep) {
    if (pt.y_qs < est.band) est.limit_converged = true;
    if (pt.y_qs >= est.band) {
      est.band_reached = true;
      est.value = pt.eps;  // sweep is decreasing in tau, so this ends at the smallest
      xs += pt.y_qs;
      ys += pt.eps;
      xx += pt.y_qs * pt.y_qs;
      xy += pt.y_qs * pt.eps;
      ++in_band;
    }
  }
  if (in_band >= 2) {
    const double denom = in_band * xx - xs * xs;
    if (denom > 0.0) {
      const double slope = (in_band * xy - xs * ys) / denom;
      est.extrapolated = std::clamp((ys - slope * xs) / in_band, 0.0, 1.0);
    } else {
      est.extrapolated = est.value;
    }
  } else {
    est.extrapolated = est.value;
  }
  return est;
}

std::vector<double> default_epsilon_sweep(double lambda1, int points, double start_factor,
                                          double end_factor) {
  if (!(lambda1 > 0.0)) throw InvalidArgument("default_epsilon_sweep: lambda1 must be positive");
  if (points < 2 || !(start_factor > end_factor) || !(end_factor > 1.0)) {
    throw InvalidArgument("default_epsilon_sweep: bad sweep spec");
  }
  std::vector<double> taus(static_cast<std::size_t>(points));
  const double ratio = std::pow(end_factor / start_factor, 1.0 / (points - 1));
  double factor = start_factor;
  for (int k = 0; k < points; ++k, factor *= ratio) {
    taus[static_cast<std::size_t>(k)] = factor / lambda1;
  }
  return taus;
}

}  // namespace epinet
