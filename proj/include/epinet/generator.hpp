#pragma once

#include <cstdint>
#include <vector>

#include "epinet/graph.hpp"
#include "epinet/params.hpp"
#include "epinet/state_space.hpp"

namespace epinet {

// Transition-rate matrix of the exact chain, stored sparse by source state.
// rate[k] is the raw rate (in beta/delta units) of jumping from state
// row to state col[k]; diag[row] = -sum of the row's rates. Every
// transition flips exactly one node's compartment:
//   SIS: infected i -> susceptible at rate delta; susceptible j with m
//        infected neighbors -> infected at rate beta*m.
//   SIR: infected i -> removed at rate delta; infections as in SIS.
struct Generator {
  StateSpace space;
  EpidemicParams params;
  std::vector<std::uint64_t> row_ptr;  // size()+1 entries
  std::vector<std::uint32_t> col;
  std::vector<double> rate;
  std::vector<double> diag;

  std::uint64_t size() const { return space.size(); }
  std::uint64_t num_transitions() const { return col.size(); }
};

Generator build_sis_generator(const Graph& g, const EpidemicParams& p,
                              int max_nodes = StateSpace::kSisDefaultCap);
Generator build_sir_generator(const Graph& g, const EpidemicParams& p,
                              int max_nodes = StateSpace::kSirDefaultCap);
Generator build_generator(Model m, const Graph& g, const EpidemicParams& p);

}  // namespace epinet
