#pragma once

#include <span>
#include <vector>

#include "epinet/generator.hpp"
#include "epinet/moments.hpp"

namespace epinet {

// Quasi-stationary distribution of the SIS chain: the dominant left
// eigenvector of the generator restricted to the transient (at least one
// infected) states, normalized to sum 1. Computed by inverse-free power
// iteration on P = I + G_sub/c with uniformization constant
// c > max |diagonal|, which is a nonnegative substochastic matrix whose
// Perron mode is exactly the QS distribution.
struct QuasiStationary {
  std::vector<double> weights;  // over the full state space; 0 at absorbing states
  double decay_rate = 0.0;      // extinction rate of the QS mode, scaled-time units
  int iterations = 0;
  double tol = 0.0;
};

QuasiStationary quasi_stationary(const Generator& gen, double tol = 1e-13,
                                 int max_iterations = 5000000);

// Observables under a QS (or any) state distribution.
double qs_prevalence(const QuasiStationary& qs, const StateObservables& obs);
double qs_expected_cut(const QuasiStationary& qs, const StateObservables& obs);
double qs_variance_z(const QuasiStationary& qs, const StateObservables& obs);
// Susceptibility chi = N Var[Z_I] / y_I.
double qs_susceptibility(const QuasiStationary& qs, const StateObservables& obs);
// max over links (k,l), both directions, of Pr[X_k = I | X_l = I].
double qs_max_link_conditional(const QuasiStationary& qs, const Graph& g);

// Sweep of the maximum link conditional toward the vanishing-prevalence
// limit. For each tau (strictly decreasing, each above 1/lambda1) the QS
// distribution is computed per connected component carrying links; recorded
// y_qs is the component-size-weighted prevalence of the whole graph.
struct EpsilonPoint {
  double tau = 0.0;
  double y_qs = 0.0;
  double eps = 0.0;
};

struct EpsilonEstimate {
  std::vector<EpsilonPoint> sweep;
  double band = 0.0;          // prevalence band 2/N
  bool band_reached = false;  // some sweep point has y_qs >= band
  // The vanishing-prevalence limit counts as approached once the sweep also
  // probes below the band; when false the sequence never left the band and
  // the limit did not converge (the sweep itself is the diagnostic).
  bool limit_converged = false;
  double value = 0.0;         // eps at the smallest tau with y_qs >= band
  double extrapolated = 0.0;  // linear extrapolation of eps vs y_qs to y -> 0
};

EpsilonEstimate epsilon_g(const Graph& g, std::span<const double> tau_sequence,
                          double tol = 1e-12);

// Geometric sweep from start_factor/lambda1 down to end_factor/lambda1.
std::vector<double> default_epsilon_sweep(double lambda1, int points = 8,
                                          double start_factor = 1.5, double end_factor = 1.02);

}  // namespace epinet
