#pragma once

#include <cstdint>
#include <span>

#include "epinet/errors.hpp"

namespace epinet {

enum class Model { SIS, SIR };

enum class Compartment : std::uint8_t { S = 0, I = 1, R = 2 };

// Enumerates the exact chain's states.
//   SIS: an n-bit word, bit j set  <=> node j infected (2^n states).
//   SIR: a base-3 little-endian word, digit j in {0:S, 1:I, 2:R} (3^n states).
// Encoding and decoding are inverse bijections over [0, size()).
class StateSpace {
 public:
  // Default caps keep exact solves CI-sized; pass a larger max_nodes (up to
  // the hard cap) to override deliberately. Beyond the cap the builders
  // throw SizeCapError and point at the Monte Carlo path.
  static constexpr int kSisDefaultCap = 14;
  static constexpr int kSisHardCap = 25;
  static constexpr int kSirDefaultCap = 9;
  static constexpr int kSirHardCap = 16;

  static StateSpace sis(int n, int max_nodes = kSisDefaultCap);
  static StateSpace sir(int n, int max_nodes = kSirDefaultCap);
  static StateSpace make(Model m, int n, int max_nodes);
  static StateSpace make(Model m, int n);

  Model model() const { return model_; }
  int num_nodes() const { return n_; }
  std::uint64_t size() const { return size_; }

  Compartment compartment(std::uint64_t state, int node) const {
    if (model_ == Model::SIS) {
      return (state >> node) & 1 ? Compartment::I : Compartment::S;
    }
    return static_cast<Compartment>((state / pow3_[node]) % 3);
  }

  // Bit j of the result is set iff node j is infected in `state`.
  std::uint64_t infected_mask(std::uint64_t state) const {
    if (model_ == Model::SIS) return state;
    std::uint64_t mask = 0;
    for (int j = 0; j < n_; ++j, state /= 3) {
      if (state % 3 == 1) mask |= std::uint64_t{1} << j;
    }
    return mask;
  }

  // SIR only; all-zero for SIS.
  std::uint64_t removed_mask(std::uint64_t state) const {
    if (model_ == Model::SIS) return 0;
    std::uint64_t mask = 0;
    for (int j = 0; j < n_; ++j, state /= 3) {
      if (state % 3 == 2) mask |= std::uint64_t{1} << j;
    }
    return mask;
  }

  std::uint64_t encode(std::span<const Compartment> comps) const;
  void decode(std::uint64_t state, std::span<Compartment> out) const;

  // A state is absorbing when it has no infected node (SIS: the empty set;
  // SIR: every all-{S,R} word).
  bool is_absorbing(std::uint64_t state) const { return infected_mask(state) == 0; }

  std::uint64_t pow3(int k) const { return pow3_[k]; }

 private:
  StateSpace(Model m, int n);

  Model model_;
  int n_;
  std::uint64_t size_;
  std::uint64_t pow3_[17] = {};
};

}  // namespace epinet
