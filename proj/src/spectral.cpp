#include <cmath>
#include <cstdio>
#include <vector>

#include "epinet/errors.hpp"
#include "epinet/graph.hpp"

namespace epinet {

namespace {

// y = A x
void adjacency_apply(const Graph& g, const std::vector<double>& x, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (auto [i, j] : g.edges()) {
    y[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(j)] += x[static_cast<std::size_t>(i)];
  }
}

}  // namespace

SpectralData spectral_radius(const Graph& g, double tol, int max_iterations) {
  if (!(tol > 0.0)) throw InvalidArgument("spectral_radius: tol must be positive");
  const int n = g.num_nodes();
  const std::size_t un = static_cast<std::size_t>(n);

  std::vector<double> x(un, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(un, 0.0);

  double rho = 0.0;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    adjacency_apply(g, x, ax);
    // Rayleigh quotient on A itself; x is kept unit-norm.
    rho = 0.0;
    for (std::size_t i = 0; i < un; ++i) rho += x[i] * ax[i];

    double res2 = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double r = ax[i] - rho * x[i];
      res2 += r * r;
    }
    if (std::sqrt(res2) <= tol) {
      return SpectralData{rho, tol, iter};
    }

    // Power step on A + I; the shift keeps the Perron root strictly
    // dominant on bipartite graphs.
    double norm2 = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      ax[i] += x[i];
      norm2 += ax[i] * ax[i];
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) {
      return SpectralData{0.0, tol, iter};
    }
    for (std::size_t i = 0; i < un; ++i) x[i] = ax[i] / norm;
  }

  char buf[128];
  std::snprintf(buf, sizeof buf,
                "spectral_radius: no convergence after %d iterations (last estimate %.17g)",
                max_iterations, rho);
  throw ConvergenceError(buf);
}

}  // namespace epinet
