#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "localcluster/error.hpp"
#include "localcluster/graph.hpp"
#include "localcluster/random.hpp"

namespace localcluster {

inline constexpr int kOutlierLabel = -1;

struct SbmSpec {
  std::vector<std::size_t> sizes;
  /// Symmetric k x k block connection probabilities.
  std::vector<std::vector<double>> probs;

  std::size_t num_nodes() const {
    std::size_t n = 0;
    for (auto s : sizes) n += s;
    return n;
  }

  void validate() const {
    const std::size_t k = sizes.size();
    detail::require(k >= 1, "sbm: at least one block is required");
    detail::require(probs.size() == k, "sbm: probability matrix must be k x k");
    for (std::size_t s = 0; s < k; ++s) {
      detail::require(sizes[s] >= 1, "sbm: block sizes must be at least 1");
      detail::require(probs[s].size() == k, "sbm: probability matrix must be k x k");
      for (std::size_t t = 0; t < k; ++t) {
        const double p = probs[s][t];
        detail::require(p >= 0.0 && p <= 1.0,
                        "sbm: P" + std::to_string(s + 1) + std::to_string(t + 1) + " = " + std::to_string(p) +
                            " is not a probability");
        detail::require(p == probs[t][s], "sbm: probability matrix must be symmetric");
      }
    }
  }
};

struct LabeledGraph {
  Graph graph;
  std::vector<int> labels;
};

/// Independent unweighted edges with block probabilities; node labels are block indices.
inline LabeledGraph sbm_generate(const SbmSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t k = spec.sizes.size();
  std::vector<std::size_t> start(k + 1, 0);
  for (std::size_t s = 0; s < k; ++s) start[s + 1] = start[s] + spec.sizes[s];
  const std::size_t n = start[k];

  std::vector<int> labels(n);
  for (std::size_t s = 0; s < k; ++s) {
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(start[s]),
              labels.begin() + static_cast<std::ptrdiff_t>(start[s + 1]), static_cast<int>(s));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  // Per row, jump straight to the next success with a geometric gap; the
  // memoryless gap lets each row restart independently.
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = s; t < k; ++t) {
      const double p = spec.probs[s][t];
      if (p <= 0.0) continue;
      const double log_q = p < 1.0 ? std::log1p(-p) : 0.0;
      for (std::size_t i = start[s]; i < start[s + 1]; ++i) {
        std::size_t j = (s == t ? i + 1 : start[t]);
        const std::size_t end = start[t + 1];
        while (j < end) {
          if (p < 1.0) {
            const double u = 1.0 - unit(rng);
            const double gap = std::floor(std::log(u) / log_q);
            if (gap >= static_cast<double>(end - j)) break;
            j += static_cast<std::size_t>(gap);
          }
          edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
          ++j;
        }
      }
    }
  }
  return {build_graph(edges, n), std::move(labels)};
}

/// Equal-as-possible block sizes for n nodes in k blocks; earlier blocks take the remainder.
inline std::vector<std::size_t> balanced_sizes(std::size_t n, std::size_t k) {
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t s = 0; s < n % k; ++s) ++sizes[s];
  return sizes;
}

/// SSBM(n, k, a ln n / n, b ln n / n), probabilities clipped to 1.
inline SbmSpec planted_partition_spec(std::size_t n, std::size_t k, double a, double b) {
  detail::require(k >= 1 && n >= k, "planted partition: need n >= k >= 1");
  detail::require(n >= 2, "planted partition: need at least two nodes");
  const double scale = std::log(static_cast<double>(n)) / static_cast<double>(n);
  const double p = std::min(1.0, a * scale);
  const double q = std::min(1.0, b * scale);
  SbmSpec spec{balanced_sizes(n, k), std::vector<std::vector<double>>(k, std::vector<double>(k, q))};
  for (std::size_t s = 0; s < k; ++s) spec.probs[s][s] = p;
  return spec;
}

inline LabeledGraph planted_partition(std::size_t n, std::size_t k, double a, double b, Rng& rng) {
  return sbm_generate(planted_partition_spec(n, k, a, b), rng);
}

/// k blocks of n1 nodes with p = 5 ln(k n1)/(k n1) and q = ln(k n1)/(k n1).
inline SbmSpec symmetric_sbm_spec(std::size_t k, std::size_t n1) {
  detail::require(k >= 1 && n1 >= 1 && k * n1 >= 2, "symmetric sbm: need k * n1 >= 2");
  return planted_partition_spec(k * n1, k, 5.0, 1.0);
}

inline LabeledGraph symmetric_sbm(std::size_t k, std::size_t n1, Rng& rng) {
  return sbm_generate(symmetric_sbm_spec(k, n1), rng);
}

/// Blocks (n1, 2 n1, 5 n1); diagonal ln²(8n1)/(6n1), ln²(8n1)/(12n1), ln²(8n1)/(30n1),
/// off-diagonal ln(8n1)/(6n1).
inline SbmSpec general_sbm_spec(std::size_t n1) {
  const double m = static_cast<double>(n1);
  const double l = std::log(8.0 * m);
  const double off = l / (6.0 * m);
  SbmSpec spec{{n1, 2 * n1, 5 * n1},
               {{l * l / (6.0 * m), off, off}, {off, l * l / (12.0 * m), off}, {off, off, l * l / (30.0 * m)}}};
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t t = 0; t < 3; ++t) {
      const double p = spec.probs[s][t];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("general sbm: P" + std::to_string(s + 1) + std::to_string(t + 1) + " = " +
                              std::to_string(p) + " is not a probability for n1 = " + std::to_string(n1));
      }
    }
  }
  return spec;
}

inline LabeledGraph general_sbm(std::size_t n1, Rng& rng) { return sbm_generate(general_sbm_spec(n1), rng); }

/// N points in R^dim, row-major, with optional labels.
struct FeatureMatrix {
  using Storage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Storage values;
  std::vector<int> labels;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.cols()); }
  bool has_labels() const noexcept { return !labels.empty(); }

  void validate() const {
    detail::require(values.allFinite(), "feature matrix: non-finite value");
    detail::require(labels.empty() || labels.size() == rows(), "feature matrix: label count mismatch");
  }
};

enum class GeometricKind { three_lines, three_circles, three_moons };

inline GeometricKind parse_geometric_kind(std::string_view name) {
  if (name == "three_lines") return GeometricKind::three_lines;
  if (name == "three_circles") return GeometricKind::three_circles;
  if (name == "three_moons") return GeometricKind::three_moons;
  throw InvalidArgument("unknown geometric dataset '" + std::string(name) +
                        "' (expected three_lines, three_circles or three_moons)");
}

inline std::string_view to_string(GeometricKind kind) {
  switch (kind) {
    case GeometricKind::three_lines: return "three_lines";
    case GeometricKind::three_circles: return "three_circles";
    case GeometricKind::three_moons: return "three_moons";
  }
  return "unknown";
}

struct GeometricOptions {
  double noise = 0.15;
  std::size_t dim = 100;
  /// Emit points in random order rather than grouped by class.
  bool shuffle = true;
};

/// Three planar shapes embedded as (x, y, 0, ..., 0) + N(0, noise² I).
inline FeatureMatrix geometric_dataset(GeometricKind kind, Rng& rng, const GeometricOptions& opt = {}) {
  detail::require(opt.dim >= 2, "geometric dataset: dimension must be at least 2");
  detail::require(opt.noise >= 0.0, "geometric dataset: noise must be nonnegative");
  std::vector<std::tuple<double, double, int>> points;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = std::numbers::pi;

  switch (kind) {
    case GeometricKind::three_lines:
      for (int line = 0; line < 3; ++line) {
        for (int i = 0; i < 1200; ++i) points.emplace_back(6.0 * unit(rng), static_cast<double>(line), line);
      }
      break;
    case GeometricKind::three_circles: {
      const double radius[] = {1.0, 2.4, 3.8};
      const int count[] = {500, 1200, 1900};
      for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < count[c]; ++i) {
          const double theta = 2.0 * pi * unit(rng);
          points.emplace_back(radius[c] * std::cos(theta), radius[c] * std::sin(theta), c);
        }
      }
      break;
    }
    case GeometricKind::three_moons: {
      // Upper halves sweep [0, pi], the lower half [pi, 2 pi].
      const double radius[] = {1.0, 1.5, 1.0};
      const double cx[] = {0.0, 1.5, 3.0};
      const double cy[] = {0.0, 0.4, 0.0};
      const double offset[] = {0.0, pi, 0.0};
      for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 1200; ++i) {
          const double theta = offset[c] + pi * unit(rng);
          points.emplace_back(cx[c] + radius[c] * std::cos(theta), cy[c] + radius[c] * std::sin(theta), c);
        }
      }
      break;
    }
  }

  if (opt.shuffle) std::shuffle(points.begin(), points.end(), rng);

  FeatureMatrix f;
  f.values = FeatureMatrix::Storage::Zero(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(opt.dim));
  f.labels.reserve(points.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y, label] = points[i];
    const auto row = static_cast<Eigen::Index>(i);
    f.values(row, 0) = x;
    f.values(row, 1) = y;
    if (opt.noise > 0.0) {
      for (Eigen::Index c = 0; c < f.values.cols(); ++c) f.values(row, c) += opt.noise * gauss(rng);
    }
    f.labels.push_back(label);
  }
  return f;
}

/// Appends floor(fraction * N) standard-normal rows labeled kOutlierLabel.
inline FeatureMatrix inject_outliers(const FeatureMatrix& f, double fraction, Rng& rng) {
  detail::require(fraction >= 0.0 && fraction <= 1.0, "inject_outliers: fraction must lie in [0, 1]");
  const auto added = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(f.rows()) + 1e-9));
  FeatureMatrix out;
  out.values.resize(f.values.rows() + added, f.values.cols());
  out.values.topRows(f.values.rows()) = f.values;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < added; ++i) {
    for (Eigen::Index c = 0; c < f.values.cols(); ++c) out.values(f.values.rows() + i, c) = gauss(rng);
  }
  out.labels = f.labels;
  if (out.labels.empty() && added > 0) out.labels.assign(f.rows(), 0);
  if (added > 0) out.labels.insert(out.labels.end(), static_cast<std::size_t>(added), kOutlierLabel);
  return out;
}

enum class Symmetrization { product, max, average };

inline Symmetrization parse_symmetrization(std::string_view name) {
  if (name == "product") return Symmetrization::product;
  if (name == "max") return Symmetrization::max;
  if (name == "average") return Symmetrization::average;
  throw InvalidArgument("unknown symmetrization '" + std::string(name) + "' (expected product, max or average)");
}

struct KnnParams {
  std::size_t k_neighbors = 15;
  std::size_t scale_rank = 10;
  Symmetrization symmetrization = Symmetrization::product;
  /// Product mode only: keep an entry when it is among the 3K heaviest of its row or its column.
  bool truncate_product = true;
};

/// Row-wise sparse directed affinity, A_ij = exp(-|x_i - x_j|² / (σ_i σ_j)) over the K nearest neighbors.
struct DirectedAffinity {
  std::vector<std::vector<std::pair<NodeId, double>>> rows;
  std::vector<double> sigma;
};

namespace detail {

inline std::vector<double> pairwise_squared_distances(const FeatureMatrix& f) {
  const std::size_t n = f.rows();
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = f.values.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (xi - f.values.row(static_cast<Eigen::Index>(j))).squaredNorm();
      d2[i * n + j] = v;
      d2[j * n + i] = v;
    }
  }
  return d2;
}

}  // namespace detail

inline DirectedAffinity knn_directed(const FeatureMatrix& f, const KnnParams& p) {
  f.validate();
  const std::size_t n = f.rows();
  detail::require(p.k_neighbors >= 1 && p.scale_rank >= 1 && p.scale_rank <= p.k_neighbors,
                  "knn: need 1 <= r <= K");
  detail::require(n > p.k_neighbors, "knn: need more points than neighbors");

  const auto d2 = detail::pairwise_squared_distances(f);
  std::vector<std::vector<NodeId>> nn(n);
  DirectedAffinity out;
  out.sigma.assign(n, 0.0);
  out.rows.resize(n);

  std::vector<NodeId> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(static_cast<NodeId>(j));
    }
    const double* row = &d2[i * n];
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p.k_neighbors), order.end(),
                      [&](NodeId a, NodeId b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    nn[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p.k_neighbors));
    double sigma = std::sqrt(row[nn[i][p.scale_rank - 1]]);
    if (sigma == 0.0) {
      for (NodeId j : nn[i]) {
        if (row[j] > 0.0) {
          sigma = std::sqrt(row[j]);
          break;
        }
      }
    }
    out.sigma[i] = sigma;
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : nn[i]) {
      const double dist2 = d2[i * n + j];
      const double scale = out.sigma[i] * out.sigma[j];
      double w;
      if (dist2 == 0.0) {
        w = 1.0;
      } else if (scale > 0.0) {
        w = std::exp(-dist2 / scale);
      } else {
        w = 0.0;
      }
      if (w > 0.0) out.rows[i].emplace_back(j, w);
    }
    std::sort(out.rows[i].begin(), out.rows[i].end());
  }
  return out;
}

namespace detail {

inline Graph graph_from_triplets(std::size_t n, std::vector<std::tuple<NodeId, NodeId, double>> upper,
                                 GraphOptions options) {
  std::vector<std::tuple<NodeId, NodeId, double>> all;
  all.reserve(2 * upper.size());
  for (const auto& [i, j, w] : upper) {
    if (w <= 0.0) continue;
    all.emplace_back(i, j, w);
    if (i != j) all.emplace_back(j, i, w);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> weights;
  for (const auto& [i, j, w] : all) {
    ++row_ptr[i + 1];
    cols.push_back(j);
    weights.push_back(w);
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return Graph::from_csr(std::move(row_ptr), std::move(cols), std::move(weights), options);
}

}  // namespace detail

/// Gaussian-kernel K-NN affinity with local scaling σ_i = distance to the r-th
/// nearest other point, symmetrized per `p.symmetrization`.
///
/// Product mode forms AᵀA, which carries a positive diagonal, so the result has
/// self-loops in that mode.
inline Graph knn_affinity(const FeatureMatrix& f, const KnnParams& p = {}) {
  const auto a = knn_directed(f, p);
  const std::size_t n = f.rows();
  std::vector<std::tuple<NodeId, NodeId, double>> upper;

  if (p.symmetrization == Symmetrization::product) {
    // (AᵀA)_ij = sum_k A_ki A_kj: every row k contributes its pairwise products.
    std::vector<std::tuple<NodeId, NodeId, std::size_t, double>> contrib;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& row = a.rows[k];
      for (std::size_t x = 0; x < row.size(); ++x) {
        for (std::size_t y = x; y < row.size(); ++y) {
          contrib.emplace_back(row[x].first, row[y].first, k, row[x].second * row[y].second);
        }
      }
    }
    std::sort(contrib.begin(), contrib.end());
    for (std::size_t e = 0; e < contrib.size();) {
      const auto i = std::get<0>(contrib[e]);
      const auto j = std::get<1>(contrib[e]);
      double w = 0.0;
      while (e < contrib.size() && std::get<0>(contrib[e]) == i && std::get<1>(contrib[e]) == j) {
        w += std::get<3>(contrib[e]);
        ++e;
      }
      upper.emplace_back(i, j, w);
    }
    if (p.truncate_product) {
      const std::size_t keep = 3 * p.k_neighbors;
      std::vector<std::vector<double>> row_weights(n);
      for (const auto& [i, j, w] : upper) {
        row_weights[i].push_back(w);
        if (i != j) row_weights[j].push_back(w);
      }
      std::vector<double> cutoff(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        auto& ws = row_weights[i];
        if (ws.size() > keep) {
          std::nth_element(ws.begin(), ws.begin() + static_cast<std::ptrdiff_t>(keep - 1), ws.end(), std::greater<>());
          cutoff[i] = ws[keep - 1];
        }
      }
      std::erase_if(upper, [&](const auto& t) {
        const auto [i, j, w] = t;
        return w < cutoff[i] && w < cutoff[j];
      });
    }
    return detail::graph_from_triplets(n, std::move(upper), GraphOptions{.allow_self_loops = true});
  }

  auto lookup = [&](NodeId i, NodeId j) {
    const auto& row = a.rows[i];
    auto it = std::lower_bound(row.begin(), row.end(), j, [](const auto& e, NodeId c) { return e.first < c; });
    return it != row.end() && it->first == j ? it->second : 0.0;
  };
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : a.rows[i]) {
      pairs.emplace_back(std::min(static_cast<NodeId>(i), j), std::max(static_cast<NodeId>(i), j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (const auto& [i, j] : pairs) {
    const double w_ij = lookup(i, j);
    const double w_ji = lookup(j, i);
    const double w = p.symmetrization == Symmetrization::max ? std::max(w_ij, w_ji) : 0.5 * (w_ij + w_ji);
    upper.emplace_back(i, j, w);
  }
  return detail::graph_from_triplets(n, std::move(upper), {});
}

}  // namespace localcluster
