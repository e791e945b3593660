#include "epinet/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "epinet/errors.hpp"

namespace epinet {

std::vector<HierarchyTerm> hierarchy_rhs_terms(const Graph& g, double tau, std::uint64_t subset) {
  if (subset == 0) throw InvalidArgument("hierarchy: subset must be non-empty");
  if (g.num_nodes() > 64) throw InvalidArgument("hierarchy: bitmask interface requires n <= 64");
  if ((subset & ~g.full_mask()) != 0) throw InvalidArgument("hierarchy: subset node out of range");

  std::map<std::uint64_t, double> acc;
  acc[subset] -= static_cast<double>(std::popcount(subset));
  for (std::uint64_t m = subset; m != 0; m &= m - 1) {
    const int node = std::countr_zero(m);
    const std::uint64_t without = subset & ~(std::uint64_t{1} << node);
    for (int k : g.neighbors(node)) {
      const std::uint64_t kbit = std::uint64_t{1} << k;
      acc[without | kbit] += tau;
      acc[subset | kbit] -= tau;
    }
  }

  std::vector<HierarchyTerm> terms;
  terms.reserve(acc.size());
  for (const auto& [mask, coef] : acc) {
    if (coef != 0.0) terms.push_back({coef, mask});
  }
  return terms;
}

double joint_infected_probability(std::span<const double> sis_dist, std::uint64_t mask) {
  double acc = 0.0;
  for (std::uint64_t s = 0; s < sis_dist.size(); ++s) {
    if ((s & mask) == mask) acc += sis_dist[s];
  }
  return acc;
}

double evaluate_hierarchy_terms(std::span<const HierarchyTerm> terms,
                                std::span<const double> sis_dist) {
  double acc = 0.0;
  for (const auto& term : terms) {
    acc += term.coefficient * joint_infected_probability(sis_dist, term.nodes);
  }
  return acc;
}

double moment_hierarchy_rhs(std::span<const double> sis_dist, std::uint64_t subset, const Graph& g,
                            const EpidemicParams& p) {
  const auto terms = hierarchy_rhs_terms(g, p.tau, subset);
  return evaluate_hierarchy_terms(terms, sis_dist);
}

int max_term_order(std::span<const HierarchyTerm> terms) {
  int order = 0;
  for (const auto& term : terms) order = std::max(order, std::popcount(term.nodes));
  return order;
}

}  // namespace epinet
