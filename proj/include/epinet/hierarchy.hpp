#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epinet/graph.hpp"
#include "epinet/params.hpp"

namespace epinet {

// One term of the joint-probability hierarchy right-hand side:
// coefficient * E[prod_{j in nodes} 1{X_j = I}], in scaled-time units.
struct HierarchyTerm {
  double coefficient = 0.0;
  std::uint64_t nodes = 0;
};

// d/dt* E[prod_{j in subset} 1{X_j=I}] for the SIS chain, expanded into
// joint-infection expectations:
//   -|subset| E[prod] + tau * sum_{m in subset} sum_k a_km E[1{X_k=I} prod_{j != m}]
//                     - tau * sum_{m in subset} sum_k a_km E[1{X_k=I} prod_j]
// with the idempotency reduction 1^2 = 1 folded in (node sets are sets), so
// when the subset covers all nodes no higher-order term survives. Terms with
// equal node sets are merged; output sorted by node set.
std::vector<HierarchyTerm> hierarchy_rhs_terms(const Graph& g, double tau, std::uint64_t subset);

// E[prod_{j in mask} 1{X_j=I}] under an SIS state distribution.
double joint_infected_probability(std::span<const double> sis_dist, std::uint64_t mask);

double evaluate_hierarchy_terms(std::span<const HierarchyTerm> terms,
                                std::span<const double> sis_dist);

// Convenience wrapper over the two steps above.
double moment_hierarchy_rhs(std::span<const double> sis_dist, std::uint64_t subset, const Graph& g,
                            const EpidemicParams& p);

int max_term_order(std::span<const HierarchyTerm> terms);

}  // namespace epinet
