#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace localcluster;
using namespace testing_support;
using Catch::Approx;

namespace {

// Best agreement over every injective map from clusters to labels.
double brute_force_accuracy(const ClusterAssignment& pred, const std::vector<int>& truth, int num_labels) {
  std::vector<int> perm(static_cast<std::size_t>(num_labels));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t counted = 0;
  for (int l : truth)
    if (l != kOutlierLabel) ++counted;
  std::size_t best = 0;
  do {
    std::size_t correct = 0;
    for (std::size_t c = 0; c < pred.clusters.size() && c < perm.size(); ++c)
      for (NodeId i : pred.clusters[c])
        if (truth[i] == perm[c]) ++correct;
    best = std::max(best, correct);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(counted);
}

std::vector<int> blocks(std::size_t k, std::size_t size) {
  std::vector<int> out;
  for (std::size_t c = 0; c < k; ++c) out.insert(out.end(), size, static_cast<int>(c));
  return out;
}

}  // namespace

TEST_CASE("jaccard examples", "[metrics]") {
  CHECK(jaccard({1, 2, 3}, {2, 3, 4}) == 0.5);
  CHECK(jaccard({1, 5}, {1, 5}) == 1.0);
  CHECK(jaccard({1, 5}, {}) == 0.0);
  CHECK(jaccard({}, {}) == 1.0);
}

TEST_CASE("jaccard is symmetric and 1 only on equality", "[metrics]") {
  auto rng = make_rng(1);
  std::uniform_int_distribution<NodeId> pick(0, 12);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<NodeId> a, b;
    for (int k = 0; k < 5; ++k) {
      a.push_back(pick(rng));
      b.push_back(pick(rng));
    }
    const NodeSet sa(a), sb(b);
    CHECK(jaccard(sa, sb) == jaccard(sb, sa));
    CHECK((jaccard(sa, sb) == 1.0) == (sa == sb));
  }
}

TEST_CASE("matched_accuracy: perfect and swapped partitions", "[metrics]") {
  const auto truth = blocks(2, 5);
  const ClusterAssignment perfect{{NodeSet::range(0, 5), NodeSet::range(5, 10)}, {}};
  CHECK(matched_accuracy(perfect, truth).accuracy == 1.0);
  CHECK(matched_accuracy(perfect, truth, MatchingMode::identity).accuracy == 1.0);

  const ClusterAssignment swapped{{NodeSet::range(5, 10), NodeSet::range(0, 5)}, {}};
  const auto res = matched_accuracy(swapped, truth);
  CHECK(res.accuracy == 1.0);
  CHECK(res.matching == std::vector<int>{1, 0});
  CHECK(matched_accuracy(swapped, truth, MatchingMode::identity).accuracy == 0.0);
}

TEST_CASE("matched_accuracy: merged classes against exhaustive matching", "[metrics]") {
  const auto truth = blocks(3, 10);
  const ClusterAssignment merged{{NodeSet::range(0, 20), NodeSet::range(20, 30)}, {}};
  const auto res = matched_accuracy(merged, truth);
  CHECK(res.accuracy == Approx(20.0 / 30.0));
  CHECK(res.accuracy == Approx(brute_force_accuracy(merged, truth, 3)));
}

TEST_CASE("matched_accuracy agrees with exhaustive search on random partitions", "[metrics]") {
  auto rng = make_rng(2);
  std::uniform_int_distribution<int> label(0, 3);
  std::uniform_int_distribution<int> cluster(-1, 3);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<int> truth(40);
    for (auto& l : truth) l = label(rng);
    if (rep % 3 == 0) truth[rep % 40] = kOutlierLabel;
    std::vector<std::vector<NodeId>> members(4);
    std::vector<NodeId> rest;
    for (NodeId i = 0; i < 40; ++i) {
      const int c = cluster(rng);
      if (c < 0) rest.push_back(i);
      else members[static_cast<std::size_t>(c)].push_back(i);
    }
    ClusterAssignment pred;
    for (auto& m : members)
      if (!m.empty()) pred.clusters.emplace_back(std::move(m));
    pred.outliers = NodeSet(rest);
    const auto res = matched_accuracy(pred, truth);
    CHECK(res.accuracy == Approx(brute_force_accuracy(pred, truth, 4)).margin(1e-12));

    auto shuffled = pred;
    std::shuffle(shuffled.clusters.begin(), shuffled.clusters.end(), rng);
    CHECK(matched_accuracy(shuffled, truth).accuracy == Approx(res.accuracy).margin(1e-12));
  }
}

TEST_CASE("matched_accuracy: more clusters than labels", "[metrics]") {
  const auto truth = blocks(2, 4);
  const ClusterAssignment pred{{{0, 1, 2, 3}, {4, 5}, {6, 7}}, {}};
  const auto res = matched_accuracy(pred, truth);
  CHECK(res.accuracy == Approx(6.0 / 8.0));
  CHECK(std::count(res.matching.begin(), res.matching.end(), kOutlierLabel) == 1);
}

TEST_CASE("matched_accuracy uses the non-outlier denominator", "[metrics]") {
  std::vector<int> truth{0, 0, 1, 1, kOutlierLabel, kOutlierLabel};
  const ClusterAssignment pred{{{0, 1}, {2, 3, 4}}, {5}};
  const auto res = matched_accuracy(pred, truth);
  CHECK(res.counted == 4);
  CHECK(res.correct == 4);
  CHECK(res.accuracy == 1.0);
}

TEST_CASE("hungarian_min on small matrices", "[metrics]") {
  const std::vector<double> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto assign = hungarian_min(cost, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i * 3 + assign[i]];
  CHECK(total == 5.0);
  CHECK(hungarian_min({}, 0).empty());
}

TEST_CASE("delta_l_spectral_norm examples", "[metrics]") {
  const auto data = disjoint_cliques(3, 5);
  CHECK(delta_l_spectral_norm(data.graph, data.labels) == 0.0);

  const auto g = barbell6();
  const std::vector<int> truth{0, 0, 0, 1, 1, 1};
  // Dense oracle: L - L_in, largest singular value.
  const auto l = dense_laplacian(g);
  const auto l_in = dense_laplacian(build_graph({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(l - l_in);
  CHECK(delta_l_spectral_norm(g, truth) == Approx(svd.singularValues()(0)).epsilon(1e-5));
}

TEST_CASE("delta_l_spectral_norm matches a dense SVD on SBM graphs", "[metrics]") {
  for (std::uint64_t t = 0; t < 3; ++t) {
    auto rng = trial_rng(17, t);
    const auto data = planted_partition(150, 3, 6.0, 1.0, rng);
    std::vector<Edge> intra;
    for (const auto& e : data.graph.edges())
      if (data.labels[e.u] == data.labels[e.v]) intra.push_back(e);
    const auto l = dense_laplacian(data.graph);
    const auto l_in = dense_laplacian(build_graph(intra, data.graph.size()));
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(l - l_in);
    const double got = delta_l_spectral_norm(data.graph, data.labels);
    CHECK(got >= 0.0);
    CHECK(got == Approx(svd.singularValues()(0)).epsilon(1e-4));
  }
}

TEST_CASE("sbm_snr examples", "[metrics]") {
  CHECK(sbm_snr(6, 1, 3) == Approx(25.0 / 24.0));
  CHECK(sbm_snr(2, 2, 3) == 0.0);
  CHECK(std::round(100.0 * sbm_snr(6 * std::log(100.0), std::log(100.0), 3)) / 100.0 == 4.80);
  CHECK_THROWS_AS(sbm_snr(0, 0, 3), InvalidArgument);
  for (double n : {100.0, 200.0, 400.0, 800.0, 12345.0})
    CHECK(sbm_snr(6 * std::log(n), std::log(n), 3) == Approx(25.0 / 24.0 * std::log(n)).epsilon(1e-14));
}

TEST_CASE("evaluate fills every report field", "[metrics]") {
  const auto truth = blocks(2, 3);
  const ClusterAssignment pred{{{3, 4, 5}, {0, 1}}, {2}};
  const auto report = evaluate(pred, truth);
  CHECK(report.accuracy == Approx(5.0 / 6.0));
  CHECK(report.matching == std::vector<int>{1, 0});
  REQUIRE(report.jaccard.size() == 2);
  CHECK(report.jaccard[0] == 1.0);
  CHECK(report.jaccard[1] == Approx(2.0 / 3.0));
  CHECK(report.denominator == "non_outlier");
  CHECK_FALSE(report.delta_l_norm);
}

TEST_CASE("summaries", "[metrics]") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std == Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
}
