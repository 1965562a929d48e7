#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "localcluster/localcluster.hpp"

namespace testing_support {

using namespace localcluster;

/// k disjoint cliques of the given size, numbered block by block.
inline LabeledGraph disjoint_cliques(std::size_t k, std::size_t size) {
  std::vector<Edge> edges;
  std::vector<int> labels;
  for (std::size_t c = 0; c < k; ++c) {
    const auto base = static_cast<NodeId>(c * size);
    for (NodeId i = 0; i < size; ++i) {
      labels.push_back(static_cast<int>(c));
      for (NodeId j = i + 1; j < size; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  return {build_graph(edges, k * size), labels};
}

/// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
inline Graph barbell6() { return build_graph({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < g.size(); ++i) {
    auto nb = g.neighbors(i);
    auto w = g.weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) a(i, nb[k]) = w[k];
  }
  return a;
}

/// I - D^{-1} A with identity rows for isolated nodes.
inline Eigen::MatrixXd dense_laplacian(const Graph& g) {
  const Eigen::MatrixXd a = dense_adjacency(g);
  const auto n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.row(i).sum();
    if (d > 0) l.row(i) -= a.row(i) / d;
  }
  return l;
}

/// Least squares by column-pivoted QR on the explicit submatrix.
inline Eigen::VectorXd dense_least_squares(const Eigen::MatrixXd& phi, const std::vector<Eigen::Index>& cols,
                                           const Eigen::VectorXd& y) {
  Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = phi.col(cols[k]);
  return sub.colPivHouseholderQr().solve(y);
}

struct BestSupport {
  std::vector<Eigen::Index> support;
  double residual = 0.0;
};

/// Exhaustive search over all size-s supports.
inline BestSupport exhaustive_best_support(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, std::size_t s) {
  const auto n = static_cast<std::size_t>(phi.cols());
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(s), 1);
  BestSupport best;
  best.residual = std::numeric_limits<double>::infinity();
  do {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (mask[j]) cols.push_back(static_cast<Eigen::Index>(j));
    const auto c = dense_least_squares(phi, cols, y);
    Eigen::VectorXd r = y;
    for (std::size_t k = 0; k < cols.size(); ++k) r -= c(static_cast<Eigen::Index>(k)) * phi.col(cols[k]);
    if (r.norm() < best.residual) best = {cols, r.norm()};
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index m, Eigen::Index n, Rng& rng, double scale) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * gauss(rng);
  return a;
}

/// Random s-sparse vector with entries bounded away from zero.
inline Eigen::VectorXd sparse_vector(Eigen::Index n, std::size_t s, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < s; ++k) x(idx[k]) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  return x;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace testing_support
