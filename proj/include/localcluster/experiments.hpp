#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "localcluster/datagen.hpp"
#include "localcluster/error.hpp"
#include "localcluster/metrics.hpp"
#include "localcluster/pipelines.hpp"
#include "localcluster/random.hpp"

namespace localcluster {

/// Explicit request, else LOCALCLUSTER_THREADS, else the hardware count.
inline std::size_t resolve_threads(std::optional<std::size_t> requested = {}) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("LOCALCLUSTER_THREADS")) {
    char* end = nullptr;
    const auto v = std::strtoul(env, &end, 10);
    detail::require(end != env && *end == '\0' && v > 0,
                    std::string("LOCALCLUSTER_THREADS must be a positive integer, got '") + env + "'");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(trial) for every trial on a small pool. Results come back in trial order.
template <class Fn>
auto run_trials(std::size_t trials, std::size_t threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Row = decltype(fn(std::size_t{}));
  std::vector<std::optional<Row>> slots(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
      try {
        slots[t] = fn(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(trials, 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Row> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Mean and sample standard deviation.
inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::vector<NodeSet> truth_clusters(std::span<const int> labels) {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(top + 1));
  for (NodeId i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(i);
  std::vector<NodeSet> out;
  for (auto& m : members) out.emplace_back(std::move(m));
  return out;
}

/// One seed per class, uniform within the class.
inline std::vector<NodeSet> sample_class_seeds(const std::vector<NodeSet>& truth, std::size_t per_class, Rng& rng) {
  std::vector<NodeSet> seeds;
  for (const auto& c : truth) {
    detail::require(c.size() >= per_class, "not enough nodes in a class to draw seeds from");
    std::vector<NodeId> pool(c.begin(), c.end());
    std::vector<NodeId> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), per_class, rng);
    seeds.emplace_back(std::move(picked));
  }
  return seeds;
}

// ---------------------------------------------------------------------------

struct SslcSbmTrial {
  double single_jaccard = 0.0;
  double single_seconds = 0.0;
  double multi_jaccard = 0.0;
  double multi_seconds = 0.0;
};

struct SslcSbmOptions {
  std::size_t k = 3;
  std::size_t iterations = 60;
  bool run_single = true;
  bool run_multi = true;
  LceParams lce;
};

/// Symmetric SBM trial: SSLC for cluster 0 and SSLC-multi for all clusters, same graph and seeds.
inline SslcSbmTrial sslc_sbm_trial(std::size_t n1, const SslcSbmOptions& opt, Rng& rng) {
  const auto data = symmetric_sbm(opt.k, n1, rng);
  const auto truth = truth_clusters(data.labels);
  const auto seeds = sample_class_seeds(truth, 1, rng);
  SslcConfig cfg;
  cfg.iterations = opt.iterations;
  cfg.lce = opt.lce;
  SslcSbmTrial out;
  if (opt.run_single) {
    Rng stream = rng;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = sslc_single(data.graph, seeds[0], truth[0].size(), cfg, stream);
    out.single_seconds = seconds_since(t0);
    out.single_jaccard = jaccard(res.cluster, truth[0]);
  }
  if (opt.run_multi) {
    Rng stream = rng;
    std::vector<std::size_t> sizes;
    for (const auto& c : truth) sizes.push_back(c.size());
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = sslc_multi(data.graph, seeds, sizes, cfg, stream);
    out.multi_seconds = seconds_since(t0);
    double acc = 0.0;
    for (std::size_t s = 0; s < truth.size(); ++s) acc += jaccard(res.assignment.clusters[s], truth[s]);
    out.multi_jaccard = acc / static_cast<double>(truth.size());
  }
  return out;
}

struct SbmSweepRow {
  std::size_t n1 = 0;
  std::size_t trials = 0;
  Summary single_jaccard, single_seconds, multi_jaccard, multi_seconds;
};

inline std::vector<std::size_t> default_sweep_sizes() { return {200, 400, 600, 800, 1000}; }

inline std::vector<SbmSweepRow> sbm_sweep(const std::vector<std::size_t>& n1s, std::size_t trials, std::uint64_t seed,
                                          const SslcSbmOptions& opt, std::size_t threads) {
  detail::require(trials >= 1, "sbm-sweep: trials must be at least 1");
  std::vector<SbmSweepRow> rows;
  for (std::size_t p = 0; p < n1s.size(); ++p) {
    const auto results = run_trials(trials, threads, [&](std::size_t t) {
      auto rng = trial_rng(seed + p, t);
      return sslc_sbm_trial(n1s[p], opt, rng);
    });
    SbmSweepRow row;
    row.n1 = n1s[p];
    row.trials = trials;
    std::vector<double> sj, ss, mj, ms;
    for (const auto& r : results) {
      sj.push_back(r.single_jaccard);
      ss.push_back(r.single_seconds);
      mj.push_back(r.multi_jaccard);
      ms.push_back(r.multi_seconds);
    }
    row.single_jaccard = summarize(sj);
    row.single_seconds = summarize(ss);
    row.multi_jaccard = summarize(mj);
    row.multi_seconds = summarize(ms);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct DeltaLRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  Summary jaccard;
  Summary delta_l;
  double snr = 0.0;
};

struct DeltaLOptions {
  std::vector<std::size_t> sizes{100, 200, 400, 800};
  std::size_t k = 3;
  double a = 6.0;
  double b = 1.0;
  /// SSLC probes for the Jaccard column; 0 skips the column.
  std::size_t iterations = 60;
};

inline double planted_snr(std::size_t n, const DeltaLOptions& opt) {
  const double ln = std::log(static_cast<double>(n));
  return sbm_snr(opt.a * ln, opt.b * ln, opt.k);
}

inline std::vector<DeltaLRow> delta_l_table(std::size_t trials, std::uint64_t seed, const DeltaLOptions& opt,
                                            std::size_t threads) {
  std::vector<DeltaLRow> rows;
  for (std::size_t p = 0; p < opt.sizes.size(); ++p) {
    const std::size_t n = opt.sizes[p];
    DeltaLRow row;
    row.n = n;
    row.trials = trials;
    row.snr = planted_snr(n, opt);
    if (trials > 0) {
      struct Trial {
        double delta_l, jaccard;
      };
      const auto results = run_trials(trials, threads, [&](std::size_t t) {
        auto rng = trial_rng(seed + p, t);
        const auto data = planted_partition(n, opt.k, opt.a, opt.b, rng);
        Trial out{delta_l_spectral_norm(data.graph, data.labels), 0.0};
        if (opt.iterations > 0) {
          const auto truth = truth_clusters(data.labels);
          const auto seeds = sample_class_seeds(truth, 1, rng);
          SslcConfig cfg;
          cfg.iterations = opt.iterations;
          out.jaccard = jaccard(sslc_single(data.graph, seeds[0], truth[0].size(), cfg, rng).cluster, truth[0]);
        }
        return out;
      });
      std::vector<double> dl, jc;
      for (const auto& r : results) {
        dl.push_back(r.delta_l);
        jc.push_back(r.jaccard);
      }
      row.delta_l = summarize(dl);
      if (opt.iterations > 0) row.jaccard = summarize(jc);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct GeometricRow {
  GeometricKind kind = GeometricKind::three_lines;
  std::size_t trials = 0;
  Summary accuracy;
  Summary seconds;
};

struct GeometricBenchOptions {
  std::vector<GeometricKind> kinds{GeometricKind::three_lines, GeometricKind::three_circles,
                                   GeometricKind::three_moons};
  std::size_t iterations = 50;
  std::size_t labels_per_class = 1;
  KnnParams knn;
  GeometricOptions data;
  LceParams lce;
};

/// One labelled run: sample the shape, build the KNN graph, run SSLC-multi from labelled seeds.
inline double geometric_trial(GeometricKind kind, const GeometricBenchOptions& opt, Rng& rng) {
  const auto data = geometric_dataset(kind, rng, opt.data);
  const auto g = knn_affinity(data, opt.knn);
  const auto truth = truth_clusters(data.labels);
  const auto seeds = sample_class_seeds(truth, opt.labels_per_class, rng);
  std::vector<std::size_t> sizes;
  for (const auto& c : truth) sizes.push_back(c.size());
  SslcConfig cfg;
  cfg.iterations = opt.iterations;
  cfg.lce = opt.lce;
  const auto res = sslc_multi(g, seeds, sizes, cfg, rng);
  return matched_accuracy(res.assignment, data.labels, MatchingMode::identity).accuracy;
}

inline std::vector<GeometricRow> geometric_bench(std::size_t trials, std::uint64_t seed,
                                                 const GeometricBenchOptions& opt, std::size_t threads) {
  detail::require(trials >= 1, "geometric bench: trials must be at least 1");
  std::vector<GeometricRow> rows;
  for (std::size_t p = 0; p < opt.kinds.size(); ++p) {
    struct Trial {
      double accuracy, seconds;
    };
    const auto results = run_trials(trials, threads, [&](std::size_t t) {
      auto rng = trial_rng(seed + p, t);
      const auto t0 = std::chrono::steady_clock::now();
      const double acc = geometric_trial(opt.kinds[p], opt, rng);
      return Trial{acc, seconds_since(t0)};
    });
    GeometricRow row;
    row.kind = opt.kinds[p];
    row.trials = trials;
    std::vector<double> acc, sec;
    for (const auto& r : results) {
      acc.push_back(r.accuracy);
      sec.push_back(r.seconds);
    }
    row.accuracy = summarize(acc);
    row.seconds = summarize(sec);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace localcluster
