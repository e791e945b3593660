#include "epinet/state_space.hpp"

#include <string>

namespace epinet {

namespace {

void check_cap(const char* model, int n, int max_nodes, int hard_cap) {
  if (n < 1) throw InvalidArgument("state space needs n >= 1");
  const int cap = max_nodes < hard_cap ? max_nodes : hard_cap;
  if (n > cap) {
    throw SizeCapError(std::string(model) + " exact state space capped at n = " +
                       std::to_string(cap) + " (requested " + std::to_string(n) +
                       "); use the monte_carlo module for larger graphs");
  }
}

}  // namespace

StateSpace::StateSpace(Model m, int n) : model_(m), n_(n) {
  if (m == Model::SIS) {
    size_ = std::uint64_t{1} << n;
  } else {
    pow3_[0] = 1;
    for (int k = 1; k <= 16; ++k) pow3_[k] = pow3_[k - 1] * 3;
    size_ = pow3_[n];
  }
}

StateSpace StateSpace::sis(int n, int max_nodes) {
  check_cap("SIS", n, max_nodes, kSisHardCap);
  return StateSpace(Model::SIS, n);
}

StateSpace StateSpace::sir(int n, int max_nodes) {
  check_cap("SIR", n, max_nodes, kSirHardCap);
  return StateSpace(Model::SIR, n);
}

StateSpace StateSpace::make(Model m, int n, int max_nodes) {
  return m == Model::SIS ? sis(n, max_nodes) : sir(n, max_nodes);
}

StateSpace StateSpace::make(Model m, int n) {
  return m == Model::SIS ? sis(n) : sir(n);
}

std::uint64_t StateSpace::encode(std::span<const Compartment> comps) const {
  if (static_cast<int>(comps.size()) != n_) throw InvalidArgument("encode: wrong length");
  std::uint64_t state = 0;
  for (int j = n_ - 1; j >= 0; --j) {
    const auto c = comps[static_cast<std::size_t>(j)];
    if (model_ == Model::SIS) {
      if (c == Compartment::R) throw InvalidArgument("encode: R is not an SIS compartment");
      state = (state << 1) | (c == Compartment::I ? 1u : 0u);
    } else {
      state = state * 3 + static_cast<std::uint64_t>(c);
    }
  }
  return state;
}

void StateSpace::decode(std::uint64_t state, std::span<Compartment> out) const {
  if (static_cast<int>(out.size()) != n_) throw InvalidArgument("decode: wrong length");
  for (int j = 0; j < n_; ++j) {
    out[static_cast<std::size_t>(j)] = compartment(state, j);
  }
}

}  // namespace epinet
