#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace epinet {

struct SpectralData {
  double lambda1 = 0.0;  // spectral radius of the adjacency matrix
  double tolerance = 0.0;
  int iterations = 0;
};

// Undirected simple graph with 0-based node indices. Immutable after
// construction; safe to share across threads.
//
// Quadratic forms over node subsets are the workhorses of the epidemic
// identities: with w the 0/1 indicator of a subset,
//   cut_size          = w^T Q w   (Q = Delta - A), the number of edges with
//                       exactly one endpoint in the subset,
//   degree_sum        = D^T w,
//   internal_adjacency= w^T A w   (ordered adjacent pairs inside the subset),
//   mixed_adjacency   = w_a^T A w_b (ordered pairs i in a, j in b).
class Graph {
 public:
  Graph() = default;

  // Strict construction: rejects self-loops, out-of-range endpoints and
  // duplicate edges.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  static Graph complete(int n);
  static Graph star(int n);  // hub at node 0
  static Graph cycle(int n);
  static Graph path(int n);
  static Graph erdos_renyi(int n, double p, std::uint64_t seed);
  // family is one of "complete", "star", "cycle", "path", "erdos_renyi".
  static Graph from_family(const std::string& family, int n, double p = 0.0,
                           std::uint64_t seed = 0);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  // Edges stored with i < j, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool has_edge(int i, int j) const;
  int degree(int v) const { return degrees_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int min_degree() const { return d_min_; }
  int max_degree() const { return d_max_; }
  bool is_regular() const { return n_ > 0 && d_min_ == d_max_; }
  int regular_degree() const;  // throws InvalidArgument if not regular

  // Bitmask interface, valid for n <= 64 (exact-solver sizes).
  std::uint64_t neighbor_mask(int v) const;
  std::uint64_t full_mask() const;
  long cut_size(std::uint64_t subset) const;
  long degree_sum(std::uint64_t subset) const;
  long internal_adjacency(std::uint64_t subset) const;
  long mixed_adjacency(std::uint64_t a, std::uint64_t b) const;

  // Subset interface for any n. Node lists may be unsorted; duplicates and
  // out-of-range entries are rejected.
  long cut_size(std::span<const int> subset) const;
  long mixed_adjacency(std::span<const int> a, std::span<const int> b) const;

  std::vector<std::vector<int>> connected_components() const;
  // Subgraph induced by `nodes` (relabeled 0..k-1 in the given order). If
  // `to_original` is non-null it receives the reverse mapping.
  Graph induced_subgraph(std::span<const int> nodes, std::vector<int>* to_original = nullptr) const;

  // Canonical serialization: "N M" header then sorted "i j" lines, LF only.
  std::string canonical_edge_list() const;

 private:
  void finalize();

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::uint64_t> adj_mask_;  // empty when n_ > 64
  std::vector<int> degrees_;
  int d_min_ = 0;
  int d_max_ = 0;
};

// Spectral radius of the adjacency matrix by power iteration on A + I
// (the shift keeps bipartite spectra from stalling the iteration), started
// from the all-one direction. Stops when the eigenvalue residual
// ||A x - rho x||_2 drops below tol.
SpectralData spectral_radius(const Graph& g, double tol = 1e-10, int max_iterations = 100000);

}  // namespace epinet
