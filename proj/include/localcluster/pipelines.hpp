#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "localcluster/error.hpp"
#include "localcluster/graph.hpp"
#include "localcluster/lce.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/random.hpp"

namespace localcluster {

/// Disjoint clusters plus the nodes nobody claimed. Ids are the graph's original ids.
struct ClusterAssignment {
  std::vector<NodeSet> clusters;
  NodeSet outliers;
};

struct SslcConfig {
  std::size_t iterations = 60;
  double overlap_fraction = 0.5;
  LceParams lce;

  void validate() const {
    detail::require(overlap_fraction == 0.5, "sslc: overlap fraction is fixed at 0.5");
    lce.validate();
  }
};

/// One probe of the resampling loop.
struct SslcProbe {
  NodeId node = 0;
  std::size_t probe_size = 0;
  /// Overlap with each target cluster at probe time.
  std::vector<std::size_t> overlaps;
  /// Index of the cluster the node joined, or -1.
  int accepted = -1;
};

struct SslcResult {
  NodeSet cluster;
  NodeSet seeds;
  std::vector<SslcProbe> probes;
  std::size_t lce_calls = 0;
};

struct SslcMultiResult {
  ClusterAssignment assignment;
  std::vector<NodeSet> seeds;
  std::vector<SslcProbe> probes;
  /// Probes where more than one cluster passed the overlap test.
  std::size_t multi_pass = 0;
  /// Nodes claimed by several clusters at the end.
  std::size_t conflicts = 0;
  std::size_t lce_calls = 0;
};

namespace detail {

inline NodeId sample_node(const std::vector<NodeId>& pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

inline bool passes_overlap(std::size_t overlap, std::size_t probe_size) { return 2 * overlap > probe_size; }

inline NodeSet to_original(const Graph& g, const NodeSet& local) {
  std::vector<NodeId> ids;
  ids.reserve(local.size());
  for (NodeId i : local) ids.push_back(g.original_id(i));
  return NodeSet(std::move(ids));
}

inline std::vector<NodeId> sampling_pool(const Graph& g) {
  auto pool = g.active_nodes();
  require(!pool.empty(), "graph has no edges to sample from");
  return pool;
}

}  // namespace detail

/// Single-cluster semi-supervised local clustering.
inline SslcResult sslc_single(const Graph& g, const NodeSet& seeds, std::size_t n_hat, const SslcConfig& cfg,
                              Rng& rng) {
  cfg.validate();
  detail::require(!seeds.empty(), "sslc: seed set is empty");
  seeds.check_range(g.size(), "sslc seeds");

  SslcResult out;
  out.seeds = seeds;
  out.cluster = lce(g, n_hat, out.seeds, cfg.lce).cluster;
  ++out.lce_calls;
  if (cfg.iterations == 0) {
    out.cluster = detail::to_original(g, out.cluster);
    return out;
  }
  const auto pool = detail::sampling_pool(g);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    SslcProbe probe;
    probe.node = detail::sample_node(pool, rng);
    const auto found = lce(g, n_hat, NodeSet{probe.node}, cfg.lce).cluster;
    ++out.lce_calls;
    probe.probe_size = found.size();
    probe.overlaps.push_back(intersection_size(out.cluster, found));
    if (detail::passes_overlap(probe.overlaps[0], probe.probe_size)) {
      probe.accepted = 0;
      if (!out.seeds.contains(probe.node)) {
        out.seeds.insert(probe.node);
        out.cluster = lce(g, n_hat, out.seeds, cfg.lce).cluster;
        ++out.lce_calls;
      }
    }
    out.probes.push_back(std::move(probe));
  }
  out.cluster = detail::to_original(g, out.cluster);
  out.seeds = detail::to_original(g, out.seeds);
  for (auto& p : out.probes) p.node = g.original_id(p.node);
  return out;
}

/// Multi-cluster variant: all target clusters are grown from one shared stream of probes.
inline SslcMultiResult sslc_multi(const Graph& g, const std::vector<NodeSet>& seeds,
                                  const std::vector<std::size_t>& sizes, const SslcConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t k = seeds.size();
  detail::require(k >= 1, "sslc-multi: at least one target cluster is required");
  detail::require(sizes.size() == k, "sslc-multi: need one size per seed set (got " + std::to_string(sizes.size()) +
                                         " sizes for " + std::to_string(k) + " seed sets)");
  for (std::size_t s = 0; s < k; ++s) {
    detail::require(!seeds[s].empty(), "sslc-multi: seed set " + std::to_string(s) + " is empty");
    seeds[s].check_range(g.size(), "sslc-multi seeds");
  }

  SslcMultiResult out;
  out.seeds = seeds;
  std::vector<LceOutput> current;
  current.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    current.push_back(lce(g, sizes[s], out.seeds[s], cfg.lce));
    ++out.lce_calls;
  }
  const std::size_t probe_size = *std::min_element(sizes.begin(), sizes.end());

  if (cfg.iterations > 0) {
    const auto pool = detail::sampling_pool(g);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      SslcProbe probe;
      probe.node = detail::sample_node(pool, rng);
      const auto found = lce(g, probe_size, NodeSet{probe.node}, cfg.lce).cluster;
      ++out.lce_calls;
      probe.probe_size = found.size();
      std::size_t passing = 0;
      for (std::size_t s = 0; s < k; ++s) {
        const auto ov = intersection_size(current[s].cluster, found);
        probe.overlaps.push_back(ov);
        if (!detail::passes_overlap(ov, probe.probe_size)) continue;
        ++passing;
        if (probe.accepted < 0 || ov > probe.overlaps[probe.accepted]) probe.accepted = static_cast<int>(s);
      }
      if (passing > 1) ++out.multi_pass;
      if (probe.accepted >= 0) {
        auto& target = out.seeds[probe.accepted];
        if (!target.contains(probe.node)) {
          target.insert(probe.node);
          current[probe.accepted] = lce(g, sizes[probe.accepted], target, cfg.lce);
          ++out.lce_calls;
        }
      }
      out.probes.push_back(std::move(probe));
    }
  }

  // Removed nodes were never solved for; they count as fully inside.
  auto score = [&](std::size_t s, NodeId i) {
    return current[s].removed.contains(i) ? 1.0 : current[s].x_sharp[i];
  };
  std::vector<int> owner(g.size(), -1);
  std::vector<char> conflicted(g.size(), 0);
  for (std::size_t s = 0; s < k; ++s) {
    for (NodeId i : current[s].cluster) {
      if (owner[i] < 0) {
        owner[i] = static_cast<int>(s);
      } else {
        conflicted[i] = 1;
        if (score(s, i) > score(static_cast<std::size_t>(owner[i]), i)) owner[i] = static_cast<int>(s);
      }
    }
  }
  out.conflicts = static_cast<std::size_t>(std::count(conflicted.begin(), conflicted.end(), 1));

  std::vector<std::vector<NodeId>> members(k);
  std::vector<NodeId> rest;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (owner[i] >= 0)
      members[owner[i]].push_back(g.original_id(i));
    else
      rest.push_back(g.original_id(i));
  }
  for (auto& m : members) out.assignment.clusters.emplace_back(std::move(m));
  out.assignment.outliers = NodeSet(std::move(rest));
  for (auto& s : out.seeds) s = detail::to_original(g, s);
  for (auto& p : out.probes) p.node = g.original_id(p.node);
  return out;
}

/// Sum of weighted co-membership indicators. Stored as the list of accumulated
/// clusters plus, per node, the clusters it appeared in.
class CoMembershipMatrix {
 public:
  explicit CoMembershipMatrix(std::size_t n = 0) : node_trials_(n) {}

  std::size_t size() const noexcept { return node_trials_.size(); }
  std::size_t trials() const noexcept { return weights_.size(); }

  void accumulate(const NodeSet& cluster, double weight) {
    cluster.check_range(size(), "comembership");
    const auto t = static_cast<std::uint32_t>(weights_.size());
    weights_.push_back(weight);
    members_.push_back(cluster.vector());
    for (NodeId i : cluster) node_trials_[i].push_back(t);
  }

  double entry(NodeId i, NodeId j) const {
    detail::require(i < size() && j < size(), "comembership: index out of range");
    const auto& a = node_trials_[i];
    const auto& b = node_trials_[j];
    double acc = 0.0;
    for (std::size_t p = 0, q = 0; p < a.size() && q < b.size();) {
      if (a[p] < b[q]) {
        ++p;
      } else if (b[q] < a[p]) {
        ++q;
      } else {
        acc += weights_[a[p]];
        ++p;
        ++q;
      }
    }
    return acc;
  }

  std::vector<double> row(NodeId i) const {
    detail::require(i < size(), "comembership: index out of range");
    std::vector<double> r(size(), 0.0);
    for (auto t : node_trials_[i])
      for (NodeId j : members_[t]) r[j] += weights_[t];
    return r;
  }

  double trace() const {
    double acc = 0.0;
    for (std::size_t t = 0; t < weights_.size(); ++t) acc += weights_[t] * static_cast<double>(members_[t].size());
    return acc;
  }

  /// Number of (i, j) pairs with a nonzero entry, counting both orders and the diagonal.
  std::size_t nonzeros() const {
    std::size_t count = 0;
    for (NodeId i = 0; i < size(); ++i) {
      if (node_trials_[i].empty()) continue;
      const auto r = row(i);
      count += static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double v) { return v > 0.0; }));
    }
    return count;
  }

 private:
  std::vector<std::vector<std::uint32_t>> node_trials_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<double> weights_;
};

inline void comembership_accumulate(CoMembershipMatrix& m, const NodeSet& cluster, double weight) {
  m.accumulate(cluster, weight);
}

struct UslcConfig {
  std::size_t iterations = 1000;
  std::size_t n_min = 1;
  /// Fixed threshold. When unset, 0.5 (n_min / n_remaining)^2 each round.
  std::optional<double> delta;
  std::optional<std::size_t> max_clusters;
  /// Run while the remaining graph is *smaller* than n_min (inverted guard).
  bool literal_guard = false;
  LceParams lce;

  void validate() const {
    detail::require(iterations >= 1, "uslc: iterations must be at least 1");
    detail::require(n_min >= 1, "uslc: n_min must be at least 1");
    if (delta) detail::require(*delta > 0.0 && *delta < 1.0, "uslc: delta must lie in (0, 1)");
    lce.validate();
  }
};

struct UslcRound {
  std::size_t remaining = 0;
  std::size_t active = 0;
  double delta = 0.0;
  std::size_t m_nonzeros = 0;
  double m_trace = 0.0;
  double m_max_offdiag = 0.0;
  std::optional<NodeId> pivot;
  std::size_t cluster_size = 0;
};

struct UslcResult {
  ClusterAssignment assignment;
  std::vector<UslcRound> rounds;
};

/// Unsupervised local clustering: peel clusters off one at a time using the
/// co-membership statistics of many single-node LCE runs.
inline UslcResult uslc(const Graph& g, const UslcConfig& cfg, Rng& rng) {
  cfg.validate();
  UslcResult out;
  Graph current = g;
  std::vector<NodeSet> found;

  while (!cfg.max_clusters || found.size() < *cfg.max_clusters) {
    const auto active = current.active_nodes();
    const std::size_t remaining = active.size();
    const bool go = cfg.literal_guard ? remaining < cfg.n_min : remaining >= cfg.n_min;
    if (!go || remaining == 0) break;

    UslcRound round;
    round.remaining = current.size();
    round.active = remaining;
    const std::size_t n_hat = std::min(cfg.n_min, current.size());
    const double ratio = static_cast<double>(cfg.n_min) / static_cast<double>(remaining);
    round.delta = cfg.delta ? *cfg.delta : 0.5 * ratio * ratio;

    CoMembershipMatrix m(current.size());
    const double weight = 1.0 / static_cast<double>(cfg.iterations);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      const NodeId v = detail::sample_node(active, rng);
      m.accumulate(lce(current, n_hat, NodeSet{v}, cfg.lce).cluster, weight);
    }
    round.m_trace = m.trace();
    round.m_nonzeros = m.nonzeros();

    std::vector<NodeId> order(current.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<NodeId> members;
    for (NodeId v : order) {
      auto r = m.row(v);
      double best = 0.0;
      for (NodeId j = 0; j < r.size(); ++j)
        if (j != v) best = std::max(best, r[j]);
      round.m_max_offdiag = std::max(round.m_max_offdiag, best);
      if (best <= round.delta) continue;
      round.pivot = current.original_id(v);
      for (NodeId j = 0; j < r.size(); ++j)
        if (r[j] > round.delta) members.push_back(j);
      break;
    }
    if (!round.pivot) {
      out.rounds.push_back(round);
      break;
    }
    NodeSet local(std::move(members));
    round.cluster_size = local.size();
    out.rounds.push_back(round);
    found.push_back(detail::to_original(current, local));
    current = induced_subgraph(current, local);
  }

  NodeSet taken;
  for (const auto& c : found) taken = set_union(taken, c);
  std::vector<NodeId> rest;
  for (NodeId i = 0; i < g.size(); ++i)
    if (!taken.contains(g.original_id(i))) rest.push_back(g.original_id(i));
  out.assignment.clusters = std::move(found);
  out.assignment.outliers = NodeSet(std::move(rest));
  return out;
}

}  // namespace localcluster
