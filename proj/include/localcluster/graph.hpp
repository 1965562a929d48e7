#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "localcluster/error.hpp"
#include "localcluster/node_set.hpp"

namespace localcluster {

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

struct GraphOptions {
  bool allow_self_loops = false;
};

/// Immutable undirected weighted graph in compressed-row form.
///
/// Every node keeps the label it had in the graph it was carved out of, so
/// clusters found on a subgraph can be reported in the caller's index space.
class Graph {
public:
  Graph() : row_ptr_(1, 0) {}

  std::size_t size() const noexcept { return degrees_.size(); }
  bool empty() const noexcept { return degrees_.empty(); }
  std::size_t num_entries() const noexcept { return cols_.size(); }
  bool has_self_loops() const noexcept { return self_loops_; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> weights(NodeId i) const {
    return {weights_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  double degree(NodeId i) const { return degrees_[i]; }
  std::span<const double> degrees() const noexcept { return degrees_; }
  double min_degree() const {
    return degrees_.empty() ? 0.0 : *std::min_element(degrees_.begin(), degrees_.end());
  }

  /// A_ij, zero when absent.
  double weight(NodeId i, NodeId j) const {
    auto nbrs = neighbors(i);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j);
    if (it == nbrs.end() || *it != j) return 0.0;
    return weights_[row_ptr_[i] + static_cast<std::size_t>(it - nbrs.begin())];
  }

  NodeId original_id(NodeId i) const { return original_ids_[i]; }
  std::span<const NodeId> original_ids() const noexcept { return original_ids_; }

  /// Nodes with positive degree, i.e. the ones pipelines may sample.
  std::vector<NodeId> active_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < size(); ++i) {
      if (degrees_[i] > 0.0) out.push_back(i);
    }
    return out;
  }

  /// Upper-triangle edge list (u <= v) with local indices.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId i = 0; i < size(); ++i) {
      auto nbrs = neighbors(i);
      auto w = weights(i);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (nbrs[k] >= i) out.push_back({i, nbrs[k], w[k]});
      }
    }
    return out;
  }

  /// Builds from a row-sorted CSR that must already be symmetric.
  static Graph from_csr(std::vector<std::size_t> row_ptr, std::vector<NodeId> cols,
                        std::vector<double> weights, GraphOptions options = {},
                        std::vector<NodeId> original_ids = {}) {
    Graph g;
    g.row_ptr_ = std::move(row_ptr);
    g.cols_ = std::move(cols);
    g.weights_ = std::move(weights);
    detail::require(!g.row_ptr_.empty() && g.row_ptr_.back() == g.cols_.size() &&
                        g.cols_.size() == g.weights_.size(),
                    "graph: inconsistent compressed-row arrays");
    const std::size_t n = g.row_ptr_.size() - 1;
    g.degrees_.assign(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
      for (std::size_t k = g.row_ptr_[i]; k < g.row_ptr_[i + 1]; ++k) {
        const NodeId j = g.cols_[k];
        detail::require(j < n, "graph: column index out of range");
        detail::require(k == g.row_ptr_[i] || g.cols_[k - 1] < j, "graph: row not strictly sorted");
        detail::require(g.weights_[k] >= 0.0 && std::isfinite(g.weights_[k]),
                        "graph: weights must be finite and nonnegative");
        if (j == i) {
          detail::require(options.allow_self_loops, "graph: self-loop on node " + std::to_string(i));
          g.self_loops_ = true;
        }
        g.degrees_[i] += g.weights_[k];
      }
    }
    for (NodeId i = 0; i < n; ++i) {
      auto nbrs = g.neighbors(i);
      auto w = g.weights(i);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (g.weight(nbrs[k], i) != w[k]) {
          throw InvalidArgument("graph: adjacency is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(nbrs[k]) + ")");
        }
      }
    }
    if (original_ids.empty()) {
      original_ids.resize(n);
      std::iota(original_ids.begin(), original_ids.end(), NodeId{0});
    }
    detail::require(original_ids.size() == n, "graph: original id map has wrong length");
    g.original_ids_ = std::move(original_ids);
    return g;
  }

private:
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> cols_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  std::vector<NodeId> original_ids_;
  bool self_loops_ = false;
};

/// Assembles a graph from undirected edges. Duplicates are summed, each edge
/// contributes to both A_uv and A_vu, zero weights are dropped. When
/// `num_nodes` is absent it is inferred from the largest index.
inline Graph build_graph(std::span<const Edge> edge_list, std::optional<std::size_t> num_nodes = {},
                         GraphOptions options = {}) {
  std::size_t n = num_nodes.value_or(0);
  if (!num_nodes) {
    for (const auto& e : edge_list) n = std::max<std::size_t>(n, std::max(e.u, e.v) + std::size_t{1});
  }
  std::vector<std::tuple<NodeId, NodeId, double>> entries;
  entries.reserve(edge_list.size());
  for (const auto& e : edge_list) {
    if (e.u >= n || e.v >= n) {
      throw InvalidArgument("build_graph: edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") out of range for " + std::to_string(n) + " nodes");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("build_graph: edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has invalid weight " + std::to_string(e.weight));
    }
    if (e.u == e.v && !options.allow_self_loops) {
      throw InvalidArgument("build_graph: self-loop on node " + std::to_string(e.u));
    }
    if (e.weight == 0.0) continue;
    entries.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v), e.weight);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  // Duplicates are merged once per unordered pair, then mirrored, so A_uv and A_vu get the same sum.
  std::vector<std::tuple<NodeId, NodeId, double>> merged;
  merged.reserve(2 * entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const auto [u, v, w0] = entries[k];
    double w = w0;
    std::size_t next = k + 1;
    while (next < entries.size() && std::get<0>(entries[next]) == u && std::get<1>(entries[next]) == v) {
      w += std::get<2>(entries[next]);
      ++next;
    }
    merged.emplace_back(u, v, w);
    if (u != v) merged.emplace_back(v, u, w);
    k = next;
  }
  std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> weights;
  cols.reserve(merged.size());
  weights.reserve(merged.size());
  for (const auto& [u, v, w] : merged) {
    cols.push_back(v);
    weights.push_back(w);
    ++row_ptr[u + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return Graph::from_csr(std::move(row_ptr), std::move(cols), std::move(weights), options);
}

inline Graph build_graph(std::initializer_list<Edge> edge_list, std::optional<std::size_t> num_nodes = {},
                         GraphOptions options = {}) {
  return build_graph(std::span<const Edge>(edge_list.begin(), edge_list.size()), num_nodes, options);
}

/// Random-walk Laplacian L = I - D^{-1} A as an implicit operator.
///
/// Rows of degree-0 nodes are identity rows.
class LaplacianView {
public:
  explicit LaplacianView(const Graph& g) : graph_(&g) {}

  const Graph& graph() const noexcept { return *graph_; }
  std::size_t size() const noexcept { return graph_->size(); }
  std::size_t rows() const noexcept { return graph_->size(); }
  std::size_t cols() const noexcept { return graph_->size(); }

  /// Visits the nonzeros (row, L_row,j) of column j in ascending row order.
  template <class F>
  void for_each_in_column(std::size_t j, F&& f) const {
    const auto node = static_cast<NodeId>(j);
    const auto nbrs = graph_->neighbors(node);
    const auto w = graph_->weights(node);
    bool diagonal_done = false;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const NodeId i = nbrs[k];
      if (!diagonal_done && i >= node) {
        if (i == node) {
          f(std::size_t{i}, 1.0 - w[k] / graph_->degree(i));
          diagonal_done = true;
          continue;
        }
        f(j, 1.0);
        diagonal_done = true;
      }
      f(std::size_t{i}, -w[k] / graph_->degree(i));
    }
    if (!diagonal_done) f(j, 1.0);
  }

  /// L x.
  std::vector<double> apply(std::span<const double> x) const {
    detail::require(x.size() == size(), "laplacian: vector length mismatch");
    std::vector<double> out(size());
    for (NodeId i = 0; i < size(); ++i) {
      const double d = graph_->degree(i);
      if (d <= 0.0) {
        out[i] = x[i];
        continue;
      }
      double acc = 0.0;
      auto nbrs = graph_->neighbors(i);
      auto w = graph_->weights(i);
      for (std::size_t k = 0; k < nbrs.size(); ++k) acc += w[k] * x[nbrs[k]];
      out[i] = x[i] - acc / d;
    }
    return out;
  }

  /// L^T r.
  void transpose_apply(std::span<const double> r, std::span<double> out) const {
    detail::require(r.size() == size() && out.size() == size(), "laplacian: vector length mismatch");
    std::vector<double> scaled(size());
    for (NodeId i = 0; i < size(); ++i) {
      const double d = graph_->degree(i);
      scaled[i] = d > 0.0 ? r[i] / d : 0.0;
    }
    for (NodeId j = 0; j < size(); ++j) {
      double acc = 0.0;
      auto nbrs = graph_->neighbors(j);
      auto w = graph_->weights(j);
      for (std::size_t k = 0; k < nbrs.size(); ++k) acc += w[k] * scaled[nbrs[k]];
      out[j] = r[j] - acc;
    }
  }

  /// L 1_S.
  std::vector<double> apply_indicator(const NodeSet& s) const {
    s.check_range(size());
    std::vector<double> indicator(size(), 0.0);
    for (NodeId i : s) indicator[i] = 1.0;
    return apply(indicator);
  }

private:
  const Graph* graph_;
};

inline LaplacianView rw_laplacian(const Graph& g) { return LaplacianView(g); }

/// P v with P = A D^{-1}. Entries of v on degree-0 nodes carry no mass forward.
inline std::vector<double> transition_matrix_apply(const Graph& g, std::span<const double> v) {
  detail::require(v.size() == g.size(), "transition_matrix_apply: vector length mismatch");
  std::vector<double> scaled(g.size());
  for (NodeId j = 0; j < g.size(); ++j) {
    const double d = g.degree(j);
    scaled[j] = d > 0.0 ? v[j] / d : 0.0;
  }
  std::vector<double> out(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    auto nbrs = g.neighbors(i);
    auto w = g.weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) acc += w[k] * scaled[nbrs[k]];
    out[i] = acc;
  }
  return out;
}

/// Graph on the nodes not in `remove`, renumbered compactly. Original labels
/// are carried through `original_id`.
inline Graph induced_subgraph(const Graph& g, const NodeSet& remove) {
  remove.check_range(g.size(), "induced_subgraph");
  constexpr NodeId kDropped = ~NodeId{0};
  std::vector<NodeId> local(g.size(), kDropped);
  std::vector<NodeId> original;
  original.reserve(g.size() - remove.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!remove.contains(i)) {
      local[i] = static_cast<NodeId>(original.size());
      original.push_back(g.original_id(i));
    }
  }
  std::vector<std::size_t> row_ptr(original.size() + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> weights;
  std::size_t row = 0;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (local[i] == kDropped) continue;
    auto nbrs = g.neighbors(i);
    auto w = g.weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (local[nbrs[k]] == kDropped) continue;
      cols.push_back(local[nbrs[k]]);
      weights.push_back(w[k]);
    }
    row_ptr[++row] = cols.size();
  }
  return Graph::from_csr(std::move(row_ptr), std::move(cols), std::move(weights),
                         GraphOptions{.allow_self_loops = g.has_self_loops()}, std::move(original));
}

}  // namespace localcluster
