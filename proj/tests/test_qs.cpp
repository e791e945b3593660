#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "epinet/errors.hpp"
#include "epinet/quasi_stationary.hpp"
#include "oracles.hpp"

using namespace epinet;

TEST_CASE("single isolated node: QS is a point mass on the infected state") {
  const Graph g1 = Graph::from_edges(1, {});
  const Generator gen = build_sis_generator(g1, EpidemicParams::from_tau(1.0));
  const QuasiStationary qs = quasi_stationary(gen);
  CHECK(qs.weights[0] == 0.0);
  CHECK(qs.weights[1] == doctest::Approx(1.0));
  CHECK(qs.decay_rate == doctest::Approx(1.0));  // dies at rate delta, scaled to 1
}

TEST_CASE("K_4 QS matches the dense restricted eigenproblem to 1e-8") {
  const Graph k4 = Graph::complete(4);
  const Generator gen = build_sis_generator(k4, EpidemicParams::from_tau(1.0));
  const QuasiStationary qs = quasi_stationary(gen, 1e-14);
  const auto dense = oracle::quasi_stationary_dense(gen);
  for (std::uint64_t s = 0; s < gen.size(); ++s) {
    CHECK(qs.weights[s] == doctest::Approx(dense[s]).epsilon(1e-8));
  }
}

TEST_CASE("QS prevalence approaches 1 for large tau on K_N") {
  const Graph k5 = Graph::complete(5);
  const Generator gen = build_sis_generator(k5, EpidemicParams::from_tau(50.0));
  const QuasiStationary qs = quasi_stationary(gen);
  const StateObservables obs(k5, gen.space);
  CHECK(qs_prevalence(qs, obs) > 0.95);
}

TEST_CASE("QS rejects SIR generators") {
  const Graph k2 = Graph::complete(2);
  const Generator gen = build_sir_generator(k2, EpidemicParams::from_tau(1.0));
  CHECK_THROWS_AS(quasi_stationary(gen), InvalidArgument);
}

TEST_CASE("K_2 link conditional is symmetric and exactly computable") {
  // Three transient states {01, 10, 11}: q solves the 3-state restriction.
  const Graph k2 = Graph::complete(2);
  const double tau = 1.3;
  const Generator gen = build_sis_generator(k2, EpidemicParams::from_tau(tau));
  const QuasiStationary qs = quasi_stationary(gen, 1e-14);
  const double p_pair = qs.weights[0b11];
  const double p0 = qs.weights[0b01] + qs.weights[0b11];
  const double p1 = qs.weights[0b10] + qs.weights[0b11];
  CHECK(p0 == doctest::Approx(p1).epsilon(1e-10));  // automorphism symmetry
  const double eps = qs_max_link_conditional(qs, k2);
  CHECK(eps == doctest::Approx(p_pair / p0).epsilon(1e-10));
}

TEST_CASE("epsilon sweep: K_N conditional decreases with N") {
  // Consistent with eps_{K_N} = O(1/sqrt(N)).
  double prev = 1.0;
  for (int n : {4, 6, 8}) {
    const Graph g = Graph::complete(n);
    const double lambda1 = spectral_radius(g).lambda1;
    const EpsilonEstimate est = epsilon_g(g, default_epsilon_sweep(lambda1, 6));
    CHECK(est.band_reached);
    CHECK(est.value > 0.0);
    CHECK(est.value < 1.0);
    CHECK(est.value < prev);
    prev = est.value;
  }
}

TEST_CASE("epsilon on a disconnected pair of edges equals the K_2 value") {
  const Graph pair = Graph::from_edges(4, {{0, 1}, {2, 3}});
  const Graph k2 = Graph::complete(2);
  const double lambda1 = spectral_radius(pair).lambda1;
  CHECK(lambda1 == doctest::Approx(1.0).epsilon(1e-9));
  const auto taus = default_epsilon_sweep(lambda1, 4);

  const EpsilonEstimate est_pair = epsilon_g(pair, taus);
  // Oracle: per-component exact QS on the 3-state restriction of K_2.
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const Generator gen = build_sis_generator(k2, EpidemicParams::from_tau(taus[i]));
    const QuasiStationary qs = quasi_stationary(gen, 1e-14);
    const double expected = qs_max_link_conditional(qs, k2);
    CHECK(est_pair.sweep[i].eps == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("epsilon sweep input validation") {
  const Graph k3 = Graph::complete(3);
  const std::vector<double> increasing{0.6, 0.7};
  CHECK_THROWS_AS(epsilon_g(k3, increasing), InvalidArgument);
  const std::vector<double> below_bound{0.8, 0.3};  // 1/lambda1 = 0.5
  CHECK_THROWS_AS(epsilon_g(k3, below_bound), InvalidArgument);
  CHECK_THROWS_AS(epsilon_g(Graph::from_edges(2, {}), std::vector<double>{1.0}), InvalidArgument);
}
