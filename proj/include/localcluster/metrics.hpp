#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "localcluster/datagen.hpp"
#include "localcluster/error.hpp"
#include "localcluster/graph.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/pipelines.hpp"

namespace localcluster {

inline double jaccard(const NodeSet& a, const NodeSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  const auto common = intersection_size(a, b);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

/// Minimum-cost assignment on a square cost matrix (row-major). Returns the column for each row.
inline std::vector<std::size_t> hungarian_min(std::span<const double> cost, std::size_t m) {
  detail::require(cost.size() == m * m, "hungarian: cost matrix must be square");
  if (m == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials, column 0 is a sentinel.
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(m, 0);
  for (std::size_t j = 1; j <= m; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

enum class MatchingMode { optimal, identity };

struct AccuracyResult {
  double accuracy = 0.0;
  /// Truth label assigned to each predicted cluster; kOutlierLabel when unmatched.
  std::vector<int> matching;
  std::size_t correct = 0;
  /// Nodes whose truth label is not the outlier label.
  std::size_t counted = 0;
};

/// Fraction of non-outlier nodes whose cluster maps to their label.
inline AccuracyResult matched_accuracy(const ClusterAssignment& pred, std::span<const int> truth,
                                       MatchingMode mode = MatchingMode::optimal) {
  std::vector<int> labels;
  for (int l : truth)
    if (l != kOutlierLabel) labels.push_back(l);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  AccuracyResult out;
  out.counted = static_cast<std::size_t>(std::count_if(truth.begin(), truth.end(), [](int l) { return l != kOutlierLabel; }));
  const std::size_t k = pred.clusters.size();
  const std::size_t nl = labels.size();
  std::vector<double> confusion(k * nl, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (NodeId i : pred.clusters[c]) {
      detail::require(i < truth.size(), "accuracy: node " + std::to_string(i) + " has no label (labels cover " +
                                            std::to_string(truth.size()) + " nodes)");
      if (truth[i] == kOutlierLabel) continue;
      const auto l = std::lower_bound(labels.begin(), labels.end(), truth[i]) - labels.begin();
      confusion[c * nl + static_cast<std::size_t>(l)] += 1.0;
    }
  }
  for (NodeId i : pred.outliers)
    detail::require(i < truth.size(), "accuracy: node " + std::to_string(i) + " has no label");

  out.matching.assign(k, kOutlierLabel);
  if (mode == MatchingMode::identity) {
    for (std::size_t c = 0; c < std::min(k, nl); ++c) out.matching[c] = labels[c];
  } else if (k > 0 && nl > 0) {
    const std::size_t m = std::max(k, nl);
    double top = 0.0;
    for (double v : confusion) top = std::max(top, v);
    std::vector<double> cost(m * m, top);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t l = 0; l < nl; ++l) cost[c * m + l] = top - confusion[c * nl + l];
    const auto assign = hungarian_min(cost, m);
    for (std::size_t c = 0; c < k; ++c)
      if (assign[c] < nl) out.matching[c] = labels[assign[c]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (out.matching[c] == kOutlierLabel) continue;
    const auto l = std::lower_bound(labels.begin(), labels.end(), out.matching[c]) - labels.begin();
    out.correct += static_cast<std::size_t>(confusion[c * nl + static_cast<std::size_t>(l)]);
  }
  out.accuracy = out.counted == 0 ? 0.0 : static_cast<double>(out.correct) / static_cast<double>(out.counted);
  return out;
}

/// Largest singular value of L - L_in, where L_in keeps only same-label edges
/// and renormalizes by the same-label degree.
inline double delta_l_spectral_norm(const Graph& g, std::span<const int> truth, std::size_t max_iter = 1000,
                                    double tolerance = 1e-6) {
  const std::size_t n = g.size();
  detail::require(truth.size() == n, "delta_l: need one label per node (got " + std::to_string(truth.size()) +
                                         " labels for " + std::to_string(n) + " nodes)");
  // Row-wise sparse storage of the difference.
  std::vector<std::size_t> ptr(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> vals;
  bool any = false;
  for (NodeId i = 0; i < n; ++i) {
    const auto nbrs = g.neighbors(i);
    const auto w = g.weights(i);
    double d_in = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (truth[nbrs[k]] == truth[i]) d_in += w[k];
    const double d = g.degree(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      double entry = d > 0.0 ? -w[k] / d : 0.0;
      if (truth[nbrs[k]] == truth[i] && d_in > 0.0) entry += w[k] / d_in;
      if (entry != 0.0) {
        cols.push_back(nbrs[k]);
        vals.push_back(entry);
        any = true;
      }
    }
    ptr[i + 1] = cols.size();
  }
  if (!any) return 0.0;

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  std::vector<double> x(n), y(n), z(n);
  for (auto& e : x) e = normal(rng);
  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    s = std::sqrt(s);
    if (s > 0.0)
      for (auto& e : v) e /= s;
    return s;
  };
  normalize(x);
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (NodeId i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) acc += vals[k] * x[cols[k]];
      y[i] = acc;
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (NodeId i = 0; i < n; ++i)
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) z[cols[k]] += vals[k] * y[i];
    double next = 0.0;
    for (NodeId i = 0; i < n; ++i) next += x[i] * z[i];
    x = z;
    if (normalize(x) == 0.0) return 0.0;
    const bool done = it > 0 && std::abs(next - lambda) <= tolerance * std::abs(next);
    lambda = next;
    if (done) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

inline double sbm_snr(double a, double b, std::size_t k) {
  detail::require(k >= 1, "snr: k must be at least 1");
  const double denom = static_cast<double>(k) * (a + static_cast<double>(k - 1) * b);
  detail::require(denom > 0.0, "snr: a + (k-1) b must be positive");
  return (a - b) * (a - b) / denom;
}

struct EvalReport {
  /// Jaccard of each predicted cluster against the label it was matched to.
  std::vector<double> jaccard;
  double accuracy = 0.0;
  std::vector<int> matching;
  std::size_t counted_nodes = 0;
  std::size_t correct_nodes = 0;
  std::string denominator = "non_outlier";
  std::optional<double> delta_l_norm;
  std::optional<double> snr;
};

inline EvalReport evaluate(const ClusterAssignment& pred, std::span<const int> truth,
                           MatchingMode mode = MatchingMode::optimal) {
  const auto acc = matched_accuracy(pred, truth, mode);
  EvalReport report;
  report.accuracy = acc.accuracy;
  report.matching = acc.matching;
  report.counted_nodes = acc.counted;
  report.correct_nodes = acc.correct;
  std::map<int, std::vector<NodeId>> by_label;
  for (NodeId i = 0; i < truth.size(); ++i) by_label[truth[i]].push_back(i);
  for (std::size_t c = 0; c < pred.clusters.size(); ++c) {
    const int l = acc.matching[c];
    if (l == kOutlierLabel) {
      report.jaccard.push_back(0.0);
      continue;
    }
    report.jaccard.push_back(jaccard(pred.clusters[c], NodeSet(by_label[l])));
  }
  return report;
}

}  // namespace localcluster
