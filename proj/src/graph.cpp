#include "epinet/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <set>

#include "epinet/errors.hpp"
#include "epinet/rng.hpp"

namespace epinet {

namespace {

void check_node_count(int n) {
  if (n < 1) throw InvalidArgument("node count must be >= 1");
}

}  // namespace

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  check_node_count(n);
  Graph g;
  g.n_ = n;
  std::set<std::pair<int, int>> seen;
  g.edges_.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (i == j) throw InvalidArgument("self-loops are not allowed");
    auto e = std::minmax(i, j);
    if (!seen.insert({e.first, e.second}).second) {
      throw InvalidArgument("duplicate edge");
    }
    g.edges_.emplace_back(e.first, e.second);
  }
  g.finalize();
  return g;
}

Graph Graph::complete(int n) {
  check_node_count(n);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return from_edges(n, edges);
}

Graph Graph::star(int n) {
  check_node_count(n);
  std::vector<std::pair<int, int>> edges;
  for (int leaf = 1; leaf < n; ++leaf) edges.emplace_back(0, leaf);
  return from_edges(n, edges);
}

Graph Graph::cycle(int n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3 to stay simple");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return from_edges(n, edges);
}

Graph Graph::path(int n) {
  check_node_count(n);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return from_edges(n, edges);
}

Graph Graph::erdos_renyi(int n, double p, std::uint64_t seed) {
  check_node_count(n);
  if (!(p >= 0.0) || !(p <= 1.0)) throw InvalidArgument("edge probability must lie in [0,1]");
  // One uniform draw per pair in lexicographic order; fully determined by
  // (n, p, seed).
  Xoshiro256 rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  return from_edges(n, edges);
}

Graph Graph::from_family(const std::string& family, int n, double p, std::uint64_t seed) {
  if (family == "complete") return complete(n);
  if (family == "star") return star(n);
  if (family == "cycle") return cycle(n);
  if (family == "path") return path(n);
  if (family == "erdos_renyi") return erdos_renyi(n, p, seed);
  throw InvalidArgument("unknown graph family: " + family);
}

void Graph::finalize() {
  std::sort(edges_.begin(), edges_.end());
  adj_.assign(static_cast<std::size_t>(n_), {});
  degrees_.assign(static_cast<std::size_t>(n_), 0);
  for (auto [i, j] : edges_) {
    adj_[static_cast<std::size_t>(i)].push_back(j);
    adj_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
  for (int v = 0; v < n_; ++v) degrees_[static_cast<std::size_t>(v)] = static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
  d_min_ = n_ > 0 ? *std::min_element(degrees_.begin(), degrees_.end()) : 0;
  d_max_ = n_ > 0 ? *std::max_element(degrees_.begin(), degrees_.end()) : 0;
  if (n_ <= 64) {
    adj_mask_.assign(static_cast<std::size_t>(n_), 0);
    for (auto [i, j] : edges_) {
      adj_mask_[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
      adj_mask_[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
    }
  }
}

bool Graph::has_edge(int i, int j) const {
  if (i == j) return false;
  const auto& nbrs = adj_[static_cast<std::size_t>(i)];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

int Graph::regular_degree() const {
  if (!is_regular()) throw InvalidArgument("graph is not regular");
  return d_min_;
}

std::uint64_t Graph::neighbor_mask(int v) const {
  if (adj_mask_.empty()) throw InvalidArgument("bitmask interface requires n <= 64");
  return adj_mask_[static_cast<std::size_t>(v)];
}

std::uint64_t Graph::full_mask() const {
  if (n_ > 64) throw InvalidArgument("bitmask interface requires n <= 64");
  return n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
}

long Graph::cut_size(std::uint64_t subset) const {
  // Each cut edge is counted once, from its endpoint inside the subset.
  const std::uint64_t inside = subset & full_mask();
  const std::uint64_t outside = full_mask() & ~inside;
  long cut = 0;
  for (std::uint64_t m = inside; m != 0; m &= m - 1) {
    const int v = std::countr_zero(m);
    cut += std::popcount(adj_mask_[static_cast<std::size_t>(v)] & outside);
  }
  return cut;
}

long Graph::degree_sum(std::uint64_t subset) const {
  const std::uint64_t inside = subset & full_mask();
  long sum = 0;
  for (std::uint64_t m = inside; m != 0; m &= m - 1) {
    sum += degrees_[static_cast<std::size_t>(std::countr_zero(m))];
  }
  return sum;
}

long Graph::internal_adjacency(std::uint64_t subset) const {
  const std::uint64_t inside = subset & full_mask();
  long pairs = 0;
  for (std::uint64_t m = inside; m != 0; m &= m - 1) {
    const int v = std::countr_zero(m);
    pairs += std::popcount(adj_mask_[static_cast<std::size_t>(v)] & inside);
  }
  return pairs;
}

long Graph::mixed_adjacency(std::uint64_t a, std::uint64_t b) const {
  const std::uint64_t in_a = a & full_mask();
  const std::uint64_t in_b = b & full_mask();
  long pairs = 0;
  for (std::uint64_t m = in_a; m != 0; m &= m - 1) {
    const int v = std::countr_zero(m);
    pairs += std::popcount(adj_mask_[static_cast<std::size_t>(v)] & in_b);
  }
  return pairs;
}

namespace {

std::vector<char> subset_flags(int n, std::span<const int> subset, const char* what) {
  std::vector<char> flag(static_cast<std::size_t>(n), 0);
  for (int v : subset) {
    if (v < 0 || v >= n) throw InvalidArgument(std::string(what) + ": node index out of range");
    if (flag[static_cast<std::size_t>(v)]) throw InvalidArgument(std::string(what) + ": duplicate node");
    flag[static_cast<std::size_t>(v)] = 1;
  }
  return flag;
}

}  // namespace

long Graph::cut_size(std::span<const int> subset) const {
  const auto flag = subset_flags(n_, subset, "cut_size");
  long cut = 0;
  for (auto [i, j] : edges_) {
    cut += flag[static_cast<std::size_t>(i)] != flag[static_cast<std::size_t>(j)];
  }
  return cut;
}

long Graph::mixed_adjacency(std::span<const int> a, std::span<const int> b) const {
  const auto in_a = subset_flags(n_, a, "mixed_adjacency");
  const auto in_b = subset_flags(n_, b, "mixed_adjacency");
  long pairs = 0;
  for (auto [i, j] : edges_) {
    if (in_a[static_cast<std::size_t>(i)] && in_b[static_cast<std::size_t>(j)]) ++pairs;
    if (in_a[static_cast<std::size_t>(j)] && in_b[static_cast<std::size_t>(i)]) ++pairs;
  }
  return pairs;
}

std::vector<std::vector<int>> Graph::connected_components() const {
  std::vector<int> comp(static_cast<std::size_t>(n_), -1);
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  for (int start = 0; start < n_; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    stack.push_back(start);
    comp[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      out[static_cast<std::size_t>(id)].push_back(v);
      for (int u : adj_[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

Graph Graph::induced_subgraph(std::span<const int> nodes, std::vector<int>* to_original) const {
  const auto flag = subset_flags(n_, nodes, "induced_subgraph");
  std::vector<int> local(static_cast<std::size_t>(n_), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[static_cast<std::size_t>(nodes[k])] = static_cast<int>(k);
  std::vector<std::pair<int, int>> edges;
  for (auto [i, j] : edges_) {
    if (flag[static_cast<std::size_t>(i)] && flag[static_cast<std::size_t>(j)]) {
      edges.emplace_back(local[static_cast<std::size_t>(i)], local[static_cast<std::size_t>(j)]);
    }
  }
  if (to_original) to_original->assign(nodes.begin(), nodes.end());
  return from_edges(static_cast<int>(nodes.size()), edges);
}

std::string Graph::canonical_edge_list() const {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d %d\n", n_, num_edges());
  out += buf;
  for (auto [i, j] : edges_) {
    std::snprintf(buf, sizeof buf, "%d %d\n", i, j);
    out += buf;
  }
  return out;
}

}  // namespace epinet
