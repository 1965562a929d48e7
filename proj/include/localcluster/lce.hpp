#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "localcluster/error.hpp"
#include "localcluster/graph.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/selection.hpp"
#include "localcluster/sparse_recovery.hpp"

namespace localcluster {

struct LceParams {
  std::size_t walk_depth = 3;
  double epsilon = 0.8;
  double gamma = 0.2;
  double rejection = 0.1;

  void validate() const {
    detail::require(epsilon > 0.0 && epsilon < 1.0, "lce: epsilon must lie in (0, 1)");
    detail::require(gamma >= 0.1 && gamma <= 0.5, "lce: gamma must lie in [0.1, 0.5]");
    detail::require(rejection >= 0.1 && rejection <= 0.9, "lce: rejection threshold must lie in [0.1, 0.9]");
  }
};

struct LceOutput {
  NodeSet cluster;
  NodeSet removed;
  NodeSet omega;
  /// Recovered coefficients indexed by node. Removed nodes are not solved for and hold 0.
  std::vector<double> x_sharp;
  double residual = 0.0;
  std::size_t sp_iterations = 0;
  /// Set when n_hat <= |U| and the sparsity target was raised to 1.
  bool sparsity_clamped = false;
};

/// v^(t) = P^t D 1_seeds.
inline std::vector<double> diffuse(const Graph& g, const NodeSet& seeds, std::size_t t) {
  detail::require(!seeds.empty(), "diffuse: seed set is empty");
  seeds.check_range(g.size(), "diffuse seeds");
  std::vector<double> v(g.size(), 0.0);
  for (NodeId i : seeds) v[i] = g.degree(i);
  for (std::size_t step = 0; step < t; ++step) v = transition_matrix_apply(g, v);
  return v;
}

/// The floor((1 + epsilon) * n_hat) largest-magnitude entries of v.
inline NodeSet candidate_set(std::span<const double> v, std::size_t n_hat, double epsilon) {
  detail::require(n_hat >= 1, "candidate_set: n_hat must be at least 1");
  const std::size_t count = floor_count((1.0 + epsilon) * static_cast<double>(n_hat));
  const auto picked = largest_magnitude(v, count);
  return NodeSet(std::vector<NodeId>(picked.begin(), picked.end()));
}

/// score_j = sum_i |L_ij| |(L 1_omega)_i| for each j in omega, in omega's order.
inline std::vector<double> removal_scores(const LaplacianView& laplacian, const NodeSet& omega) {
  const auto boundary = laplacian.apply_indicator(omega);
  std::vector<double> scores;
  scores.reserve(omega.size());
  for (NodeId j : omega) {
    double acc = 0.0;
    laplacian.for_each_in_column(j, [&](std::size_t i, double v) { acc += std::abs(v) * std::abs(boundary[i]); });
    scores.push_back(acc);
  }
  return scores;
}

/// The floor(gamma * |omega|) members of omega with the smallest removal scores.
inline NodeSet removal_set(const LaplacianView& laplacian, const NodeSet& omega, double gamma) {
  detail::require(!omega.empty(), "removal_set: omega is empty");
  const auto scores = removal_scores(laplacian, omega);
  const auto picked = smallest_values(scores, floor_count(gamma * static_cast<double>(omega.size())));
  std::vector<NodeId> ids;
  ids.reserve(picked.size());
  for (std::size_t k : picked) ids.push_back(omega[k]);
  return NodeSet(std::move(ids));
}

/// Extracts the cluster around `seeds` whose size is roughly `n_hat`.
///
/// Diffuses from the seeds, takes the top (1+epsilon)n_hat nodes as Ω, removes
/// the gamma|Ω| members of Ω that look most interior, then solves the sparse
/// system L_{V\U} x ≈ L 1_{V\U} over every remaining column with sparsity
/// n_hat - |U|. Nodes with x_i > rejection, plus U, form the cluster.
inline LceOutput lce(const Graph& g, std::size_t n_hat, const NodeSet& seeds, const LceParams& params = {},
                     const LeastSquaresOptions& ls = {}) {
  params.validate();
  const std::size_t n = g.size();
  detail::require(n_hat >= 1 && n_hat <= n,
                  "lce: n_hat must lie in [1, " + std::to_string(n) + "], got " + std::to_string(n_hat));
  seeds.check_range(n, "lce seeds");

  LceOutput out;
  const LaplacianView laplacian(g);
  const auto v = diffuse(g, seeds, params.walk_depth);
  out.omega = candidate_set(v, n_hat, params.epsilon);
  out.removed = removal_set(laplacian, out.omega, params.gamma);

  std::vector<std::size_t> columns;
  columns.reserve(n - out.removed.size());
  std::vector<double> kept(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    if (!out.removed.contains(i)) {
      columns.push_back(i);
      kept[i] = 1.0;
    }
  }
  const auto y = laplacian.apply(kept);

  std::size_t sparsity = 1;
  if (n_hat > out.removed.size()) {
    sparsity = n_hat - out.removed.size();
  } else {
    out.sparsity_clamped = true;
  }

  out.x_sharp.assign(n, 0.0);
  std::vector<NodeId> members(out.removed.begin(), out.removed.end());
  if (!columns.empty()) {
    const ColumnSubset<LaplacianView> phi(laplacian, columns);
    SubspacePursuitOptions sp;
    sp.max_iter = default_max_iterations(n);
    sp.least_squares = ls;
    const auto rec = subspace_pursuit(SensingProblem<ColumnSubset<LaplacianView>>{phi, y, sparsity}, sp);
    out.residual = rec.residual_norm;
    out.sp_iterations = rec.iterations;
    for (NodeId k : rec.support) {
      const auto node = static_cast<NodeId>(columns[k]);
      out.x_sharp[node] = rec.x[k];
      if (rec.x[k] > params.rejection) members.push_back(node);
    }
  }
  out.cluster = NodeSet(std::move(members));
  return out;
}

}  // namespace localcluster
