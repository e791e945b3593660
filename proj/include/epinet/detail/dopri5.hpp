#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "epinet/errors.hpp"

namespace epinet::detail {

// Dormand-Prince 5(4) embedded pair with PI-free standard step control and
// FSAL. Integrates y' = f(y) (autonomous RHS) and lands exactly on every
// requested grid time, invoking `visit` there. grid[0] must equal the start
// time; y holds the state at grid.back() on return.
struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_step = 0.0;  // 0 = unbounded
};

using OdeRhs = std::function<void(std::span<const double>, std::span<double>)>;
using OdeVisitor = std::function<void(std::size_t, std::span<const double>)>;

inline void integrate_dopri5(const OdeRhs& rhs, std::vector<double>& y,
                             std::span<const double> grid, const OdeOptions& opt,
                             const OdeVisitor& visit) {
  if (grid.empty()) throw InvalidArgument("integrate: empty time grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw InvalidArgument("integrate: grid must be strictly increasing");
  }
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw InvalidArgument("integrate: tolerances must be positive");

  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  std::vector<double> work(dim), ynew(dim);

  if (visit) visit(0, y);
  if (grid.size() == 1) return;

  double t = grid[0];
  rhs(y, k1);  // FSAL seed

  // Conservative initial step; the controller grows it quickly.
  double rhs_scale = opt.atol;
  for (std::size_t i = 0; i < dim; ++i) rhs_scale = std::max(rhs_scale, std::abs(k1[i]));
  double h = std::min(grid[1] - t, 0.01 / (1.0 + rhs_scale));
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

  std::size_t next = 1;
  while (next < grid.size()) {
    const double t_target = grid[next];
    // Stretch up to 5% to land on the target exactly; a leftover sliver
    // step would otherwise look like stiffness to the underflow guard.
    const double controller_h = h;
    bool hit_target = false;
    if (1.05 * h >= t_target - t) {
      h = t_target - t;
      hit_target = true;
    }
    if (!hit_target && h < 16.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(t))) {
      throw ConvergenceError(
          "integrate: step size underflow (system too stiff at this tolerance); "
          "reduce the tau range or fall back to a uniformization-based solve");
    }

    auto stage = [&](std::vector<double>& kout, std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = y[i];
        for (const auto& [kvec, a] : terms) acc += h * a * (*kvec)[i];
        work[i] = acc;
      }
      rhs(work, kout);
    };

    stage(k2, {{&k1, 1.0 / 5}});
    stage(k3, {{&k1, 3.0 / 40}, {&k2, 9.0 / 40}});
    stage(k4, {{&k1, 44.0 / 45}, {&k2, -56.0 / 15}, {&k3, 32.0 / 9}});
    stage(k5, {{&k1, 19372.0 / 6561}, {&k2, -25360.0 / 2187}, {&k3, 64448.0 / 6561}, {&k4, -212.0 / 729}});
    stage(k6, {{&k1, 9017.0 / 3168}, {&k2, -355.0 / 33}, {&k3, 46732.0 / 5247}, {&k4, 49.0 / 176}, {&k5, -5103.0 / 18656}});

    // 5th-order solution (also the 7th stage input).
    for (std::size_t i = 0; i < dim; ++i) {
      ynew[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                            2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);
    }
    rhs(ynew, k7);

    // Embedded error: y5 - y4.
    double err2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double e = h * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] + 71.0 / 1920 * k4[i] -
                            17253.0 / 339200 * k5[i] + 22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = e / scale;
      err2 += r * r;
    }
    const double err = std::sqrt(err2 / static_cast<double>(dim));

    if (err <= 1.0) {
      t = hit_target ? t_target : t + h;
      std::swap(y, ynew);
      std::swap(k1, k7);  // FSAL
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 1.0, 5.0);
      if (hit_target) {
        if (visit) visit(next, y);
        ++next;
        // Target clamps must not ratchet the working step size down.
        h = std::max(controller_h, h * fac);
      } else {
        h *= fac;
      }
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
  }
}

}  // namespace epinet::detail
