// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "../support.hpp"

using namespace localcluster;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) { return seconds_since(t0); }

// 1. SNR column of the planted-partition table, to two decimals.
Outcome snr_column() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = delta_l_table(0, 11, {}, 1);
  const double secs = elapsed(t0);
  const char* expected[] = {"4.80", "5.52", "6.24", "6.96"};
  bool ok = rows.size() == 4 && secs < 1.0;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto s = fmt("%.2f", rows[i].snr);
    got += (i ? "," : "") + s;
    if (i < 4 && s != expected[i]) ok = false;
  }
  return {ok, fmt("snr=(%s) expected (4.80,5.52,6.24,6.96), %.3fs", got.c_str(), secs)};
}

// 2. Mean spectral norm of L - L_in over 20 graphs per size.
Outcome delta_l_norms() {
  const auto t0 = std::chrono::steady_clock::now();
  DeltaLOptions opt;
  opt.iterations = 0;
  const auto rows = delta_l_table(20, 11, opt, resolve_threads());
  const double secs = elapsed(t0);
  const double target[] = {0.4543, 0.4238, 0.3982, 0.3725};
  bool ok = secs < 300.0;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    got += fmt("%sn=%zu %.4f(sd %.4f) vs %.4f", i ? "; " : "", rows[i].n, rows[i].delta_l.mean, rows[i].delta_l.std,
               target[i]);
    if (std::abs(rows[i].delta_l.mean - target[i]) > 0.05) ok = false;
  }
  return {ok, got + fmt(", %.1fs", secs)};
}

// 3 and 4 share one sweep.
std::vector<SbmSweepRow> sweep_rows;
double sweep_seconds = 0.0;

void run_sweep() {
  if (!sweep_rows.empty()) return;
  const auto t0 = std::chrono::steady_clock::now();
  sweep_rows = sbm_sweep({200, 400, 600}, 100, 2024, SslcSbmOptions{}, resolve_threads());
  sweep_seconds = elapsed(t0);
}

// 3. SSLC Jaccard on the symmetric SBM, plus the planted-partition Jaccard column.
Outcome sslc_sbm() {
  run_sweep();
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < sweep_rows.size(); ++i) {
    const auto& r = sweep_rows[i];
    got += fmt("%sn1=%zu %.4f(sd %.4f)", i ? "; " : "", r.n1, r.single_jaccard.mean, r.single_jaccard.std);
    // Monotone within noise: a drop larger than two standard errors of the difference fails.
    if (i > 0) {
      const auto& p = sweep_rows[i - 1];
      const double se = std::sqrt((p.single_jaccard.std * p.single_jaccard.std +
                                   r.single_jaccard.std * r.single_jaccard.std) /
                                  static_cast<double>(r.trials));
      if (r.single_jaccard.mean < p.single_jaccard.mean - 2.0 * se) ok = false;
    }
  }
  if (sweep_rows[0].single_jaccard.mean < 0.90) ok = false;
  if (sweep_rows[2].single_jaccard.mean < 0.95) ok = false;

  const auto t0 = std::chrono::steady_clock::now();
  DeltaLOptions opt;
  opt.sizes = {200, 400, 800};
  const auto rows = delta_l_table(100, 31, opt, resolve_threads());
  const double table_secs = elapsed(t0);
  const double target[] = {0.9373, 0.9604, 0.9918};
  got += " | planted:";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    got += fmt(" n=%zu %.4f vs %.4f", rows[i].n, rows[i].jaccard.mean, target[i]);
    if (std::abs(rows[i].jaccard.mean - target[i]) > 0.05) ok = false;
  }
  if (sweep_seconds > 1800.0) ok = false;
  return {ok, got + fmt(", sweep %.1fs, table %.1fs", sweep_seconds, table_secs)};
}

// 4. All clusters at once costs less than three single-cluster runs.
Outcome multi_efficiency() {
  run_sweep();
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < sweep_rows.size(); ++i) {
    const auto& r = sweep_rows[i];
    const double ratio = r.multi_seconds.mean / r.single_seconds.mean;
    got += fmt("%sn1=%zu multi/single=%.2f (multi J %.4f)", i ? "; " : "", r.n1, ratio, r.multi_jaccard.mean);
    if (!(ratio < 3.0)) ok = false;
  }
  return {ok, got};
}

// 5. Geometric shapes, one label per class, 100 trials each.
Outcome geometric() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = geometric_bench(100, 7, GeometricBenchOptions{}, resolve_threads());
  const double secs = elapsed(t0);
  const double mean[] = {0.948, 0.982, 0.973};
  const double sd[] = {0.072, 0.041, 0.012};
  bool ok = secs < 2700.0;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    got += fmt("%s%s %.4f(sd %.4f) vs %.3f+-%.3f", i ? "; " : "", std::string(to_string(rows[i].kind)).c_str(),
               rows[i].accuracy.mean, rows[i].accuracy.std, mean[i], 2 * sd[i]);
    if (std::abs(rows[i].accuracy.mean - mean[i]) > 2.0 * sd[i]) ok = false;
  }
  return {ok, got + fmt(", %.1fs", secs)};
}

// 6. Exact behaviour on disjoint cliques.
Outcome exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t k = 4, size = 25;
  const auto data = disjoint_cliques(k, size);
  const auto& g = data.graph;
  const auto truth = truth_clusters(data.labels);
  const LaplacianView l(g);

  bool kernel = true;
  for (const auto& c : truth)
    for (double v : l.apply_indicator(c)) kernel = kernel && v == 0.0;

  auto rng = make_rng(606);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.size() - 1));
  std::size_t lce_hits = 0;
  for (int t = 0; t < 100; ++t) {
    const NodeId s = pick(rng);
    if (lce(g, size, {s}).cluster == truth[static_cast<std::size_t>(data.labels[s])]) ++lce_hits;
  }

  std::size_t probes = 0, dichotomy = 0;
  for (std::size_t c = 0; c < k; ++c) {
    SslcConfig cfg;
    cfg.iterations = 20;
    const auto seed = truth[c][0];
    const auto res = sslc_single(g, {seed}, size, cfg, rng);
    for (const auto& p : res.probes) {
      ++probes;
      const bool same = data.labels[p.node] == static_cast<int>(c);
      if ((same && p.overlaps[0] == p.probe_size) || (!same && p.overlaps[0] == 0)) ++dichotomy;
    }
  }

  UslcConfig ucfg;
  ucfg.iterations = 300;
  ucfg.n_min = size;
  const auto u = uslc(g, ucfg, rng);
  auto clusters = u.assignment.clusters;
  auto by_ids = [](const NodeSet& a, const NodeSet& b) { return a.vector() < b.vector(); };
  std::sort(clusters.begin(), clusters.end(), by_ids);
  auto expected = truth;
  std::sort(expected.begin(), expected.end(), by_ids);
  const bool partition = clusters == expected && u.assignment.outliers.empty();

  const double secs = elapsed(t0);
  const bool ok = kernel && lce_hits == 100 && dichotomy == probes && partition && secs < 60.0;
  return {ok, fmt("kernel=%s lce=%zu/100 dichotomy=%zu/%zu uslc_partition=%s, %.1fs", kernel ? "exact" : "broken",
                  lce_hits, dichotomy, probes, partition ? "exact" : "wrong", secs)};
}

// 7. Subspace pursuit against exhaustive search.
Outcome sp_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  auto rng = make_rng(707);
  std::uniform_int_distribution<int> n_dist(7, 14), s_dist(1, 3);
  std::size_t exact = 0, agree = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = n_dist(rng);
    const auto s = static_cast<std::size_t>(s_dist(rng));
    std::uniform_int_distribution<int> m_dist(static_cast<int>(2 * s), n - 1);
    const int m = m_dist(rng);
    const Eigen::MatrixXd a = gaussian_matrix(m, n, rng, 1.0 / std::sqrt(static_cast<double>(m)));
    const Eigen::VectorXd y = a * sparse_vector(n, s, rng);
    const DenseColumnOperator phi(a);
    const auto r = subspace_pursuit(SensingProblem<DenseColumnOperator>{phi, to_std(y), s});
    if (r.residual_norm > 1e-8) continue;
    ++exact;
    const auto best = exhaustive_best_support(a, y, s);
    if (std::abs(best.residual - r.residual_norm) <= 1e-8) ++agree;
  }

  std::size_t recovered = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::MatrixXd a = gaussian_matrix(6, 12, rng, 1.0 / std::sqrt(6.0));
    const Eigen::VectorXd x0 = sparse_vector(12, 2, rng);
    const DenseColumnOperator phi(a);
    const auto r = subspace_pursuit(SensingProblem<DenseColumnOperator>{phi, to_std(a * x0), 2});
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.x.data(), 12);
    if ((x - x0).norm() <= 1e-6 * x0.norm()) ++recovered;
  }
  const double secs = elapsed(t0);
  const bool ok = agree == exact && recovered >= 190 && secs < 60.0;
  return {ok, fmt("oracle agreement %zu/%zu exact instances; 6x12 s=2 recovery %zu/200, %.1fs", agree, exact,
                  recovered, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> all{
      {1, "snr-closed-form", snr_column},        {2, "delta-l-spectral-norm", delta_l_norms},
      {3, "sslc-symmetric-sbm", sslc_sbm},       {4, "multi-cluster-efficiency", multi_efficiency},
      {5, "geometric-accuracy", geometric},      {6, "disjoint-clique-exactness", exactness},
      {7, "subspace-pursuit-oracle", sp_oracle},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures ? 1 : 0;
}
