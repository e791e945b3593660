#include "epinet/generator.hpp"

#include <bit>

#include "epinet/errors.hpp"

namespace epinet {

Generator build_sis_generator(const Graph& g, const EpidemicParams& p, int max_nodes) {
  const int n = g.num_nodes();
  Generator gen{StateSpace::sis(n, max_nodes), p, {}, {}, {}, {}};
  const std::uint64_t size = gen.space.size();
  const std::uint64_t full = g.full_mask();

  gen.row_ptr.reserve(size + 1);
  gen.diag.reserve(size);
  gen.row_ptr.push_back(0);
  for (std::uint64_t s = 0; s < size; ++s) {
    double outflow = 0.0;
    // Curing: one transition per infected node.
    for (std::uint64_t m = s; m != 0; m &= m - 1) {
      const int i = std::countr_zero(m);
      gen.col.push_back(static_cast<std::uint32_t>(s ^ (std::uint64_t{1} << i)));
      gen.rate.push_back(p.delta);
      outflow += p.delta;
    }
    // Infection: susceptible j with at least one infected neighbor.
    for (std::uint64_t m = full & ~s; m != 0; m &= m - 1) {
      const int j = std::countr_zero(m);
      const int infected_nbrs = std::popcount(g.neighbor_mask(j) & s);
      if (infected_nbrs == 0) continue;
      const double r = p.beta * infected_nbrs;
      gen.col.push_back(static_cast<std::uint32_t>(s | (std::uint64_t{1} << j)));
      gen.rate.push_back(r);
      outflow += r;
    }
    gen.row_ptr.push_back(gen.col.size());
    gen.diag.push_back(-outflow);
  }
  return gen;
}

Generator build_sir_generator(const Graph& g, const EpidemicParams& p, int max_nodes) {
  const int n = g.num_nodes();
  Generator gen{StateSpace::sir(n, max_nodes), p, {}, {}, {}, {}};
  const StateSpace& space = gen.space;
  const std::uint64_t size = space.size();

  std::vector<std::uint8_t> digits(static_cast<std::size_t>(n), 0);
  gen.row_ptr.push_back(0);
  for (std::uint64_t s = 0; s < size; ++s) {
    // Little-endian base-3 digits of s; maintained incrementally below.
    std::uint64_t infected = 0;
    for (int j = 0; j < n; ++j) {
      if (digits[static_cast<std::size_t>(j)] == 1) infected |= std::uint64_t{1} << j;
    }
    double outflow = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::uint8_t d = digits[static_cast<std::size_t>(j)];
      if (d == 1) {
        // I -> R, digit 1 -> 2.
        gen.col.push_back(static_cast<std::uint32_t>(s + space.pow3(j)));
        gen.rate.push_back(p.delta);
        outflow += p.delta;
      } else if (d == 0) {
        const int infected_nbrs = std::popcount(g.neighbor_mask(j) & infected);
        if (infected_nbrs == 0) continue;
        // S -> I, digit 0 -> 1.
        const double r = p.beta * infected_nbrs;
        gen.col.push_back(static_cast<std::uint32_t>(s + space.pow3(j)));
        gen.rate.push_back(r);
        outflow += r;
      }
    }
    gen.row_ptr.push_back(gen.col.size());
    gen.diag.push_back(-outflow);

    // Increment the base-3 counter.
    for (int j = 0; j < n; ++j) {
      if (++digits[static_cast<std::size_t>(j)] < 3) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
  }
  return gen;
}

Generator build_generator(Model m, const Graph& g, const EpidemicParams& p) {
  return m == Model::SIS ? build_sis_generator(g, p) : build_sir_generator(g, p);
}

}  // namespace epinet
