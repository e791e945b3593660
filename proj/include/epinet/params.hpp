#pragma once

#include "epinet/errors.hpp"

namespace epinet {

// Per-link infection rate beta, per-node curing rate delta, and the
// effective infection rate tau = beta/delta. All times elsewhere in the
// library are expressed in scaled units t* = delta * t, so tau is usually
// the only knob that matters.
struct EpidemicParams {
  double beta;
  double delta;
  double tau;

  EpidemicParams(double beta_, double delta_) : beta(beta_), delta(delta_), tau(beta_ / delta_) {
    if (!(beta > 0.0) || !(delta > 0.0)) {
      throw InvalidArgument("epidemic rates must be strictly positive");
    }
  }

  // tau-only parameterization: delta = 1, so t* and t coincide.
  static EpidemicParams from_tau(double tau) { return EpidemicParams(tau, 1.0); }
};

}  // namespace epinet
