#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace localcluster;
using namespace testing_support;
using Catch::Approx;

namespace {

Graph two_triangles() { return build_graph({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}); }

}  // namespace

TEST_CASE("diffuse examples", "[lce]") {
  const auto k3 = build_graph({{0, 1}, {1, 2}, {0, 2}});
  CHECK(diffuse(k3, {0}, 0) == std::vector<double>{2, 0, 0});
  CHECK(diffuse(k3, {0}, 1) == std::vector<double>{0, 1, 1});

  const auto v = diffuse(two_triangles(), {1}, 3);
  for (int i = 3; i < 6; ++i) CHECK(v[i] == 0.0);
  CHECK(v[0] + v[1] + v[2] == Approx(2.0));

  CHECK_THROWS_AS(diffuse(k3, {}, 3), InvalidArgument);
}

TEST_CASE("diffuse conserves seed volume", "[lce]") {
  auto rng = make_rng(14);
  const auto data = symmetric_sbm(3, 50, rng);
  REQUIRE(data.graph.min_degree() > 0);
  const NodeSet seeds{0, 7, 60};
  double vol = 0.0;
  for (NodeId s : seeds) vol += data.graph.degree(s);
  const auto v = diffuse(data.graph, seeds, 5);
  CHECK(std::accumulate(v.begin(), v.end(), 0.0) == Approx(vol).epsilon(1e-12));
}

TEST_CASE("candidate_set examples", "[lce]") {
  const std::vector<double> v{0.1, 0.9, 0.5, 0};
  CHECK(candidate_set(v, 1, 0.8) == NodeSet{1});
  CHECK(candidate_set(v, 2, 0.8) == NodeSet{0, 1, 2});
  CHECK(candidate_set(std::vector<double>(5, 1.0), 2, 0.0) == NodeSet{0, 1});
  CHECK(candidate_set(v, 4, 0.8).size() == 4);
  CHECK(candidate_set(std::vector<double>{-3, 1, 2}, 1, 0.0) == NodeSet{0});
}

TEST_CASE("removal_set on a whole component returns the first members", "[lce]") {
  const auto g = two_triangles();
  const LaplacianView l(g);
  const NodeSet omega{3, 4, 5};
  for (double s : removal_scores(l, omega)) CHECK(s == 0.0);
  CHECK(removal_set(l, omega, 0.4) == NodeSet{3});
  CHECK(removal_set(l, omega, 0.2).empty());
}

TEST_CASE("removal_scores match the dense |L^T| |L 1_omega| on the barbell", "[lce]") {
  const auto g = barbell6();
  const LaplacianView l(g);
  const NodeSet omega{0, 1, 2, 3};
  const Eigen::MatrixXd dense = dense_laplacian(g);
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(6);
  for (NodeId i : omega) ind(i) = 1.0;
  const Eigen::VectorXd oracle = dense.cwiseAbs().transpose() * (dense * ind).cwiseAbs();

  const auto scores = removal_scores(l, omega);
  for (std::size_t k = 0; k < omega.size(); ++k) CHECK(scores[k] == Approx(oracle(omega[k])).margin(1e-14));
  CHECK(scores[0] < scores[3]);
  CHECK(scores[1] < scores[3]);
  CHECK(removal_set(l, omega, 0.5) == NodeSet{0, 1});
}

TEST_CASE("lce recovers a clique among disjoint cliques", "[lce]") {
  const auto data = disjoint_cliques(3, 20);
  const auto out1 = lce(data.graph, 20, {4});
  CHECK(out1.cluster == NodeSet::range(0, 20));
  const auto out2 = lce(data.graph, 20, {27});
  CHECK(out2.cluster == NodeSet::range(20, 40));
  CHECK(out2.residual <= 1e-8);
}

TEST_CASE("lce output invariants", "[lce]") {
  auto rng = make_rng(15);
  const auto data = symmetric_sbm(3, 60, rng);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(data.graph.size() - 1));
  for (int rep = 0; rep < 10; ++rep) {
    const NodeSet seeds{pick(rng)};
    const auto out = lce(data.graph, 60, seeds);
    CHECK(is_subset(out.removed, out.omega));
    CHECK(is_subset(out.removed, out.cluster));
    CHECK(out.cluster.size() <= 60);
    CHECK(out.omega.size() == 108);
    CHECK(out.removed.size() == 21);
    for (NodeId i : set_difference(out.cluster, out.removed)) CHECK(out.x_sharp[i] > 0.1);
    for (NodeId i : out.removed) CHECK(out.x_sharp[i] == 0.0);
    const auto again = lce(data.graph, 60, seeds);
    CHECK(again.cluster == out.cluster);
    CHECK(again.x_sharp == out.x_sharp);
  }
}

TEST_CASE("lce exactness across removal windows", "[lce]") {
  // gamma spans |U| from about 0.1 to 0.9 of the seeded component when epsilon is small.
  const auto data = disjoint_cliques(4, 15);
  for (double gamma : {0.1, 0.2, 0.3, 0.5}) {
    for (double eps : {0.1, 0.5, 0.8}) {
      LceParams p;
      p.gamma = gamma;
      p.epsilon = eps;
      const auto out = lce(data.graph, 15, {33}, p);
      const auto u = out.removed.size();
      if (10 * u <= 15 || 10 * u >= 9 * 15) continue;
      INFO("gamma=" << gamma << " eps=" << eps);
      CHECK(out.cluster == NodeSet::range(30, 45));
    }
  }
}

TEST_CASE("lce rejects bad arguments", "[lce]") {
  const auto k3 = build_graph({{0, 1}, {1, 2}, {0, 2}});
  CHECK_THROWS_AS(lce(k3, 0, {0}), InvalidArgument);
  CHECK_THROWS_AS(lce(k3, 4, {0}), InvalidArgument);
  CHECK_THROWS_AS(lce(k3, 2, {7}), InvalidArgument);
  LceParams bad;
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(lce(k3, 2, {0}, bad), InvalidArgument);
}

TEST_CASE("removal set stays below n_hat for valid parameters", "[lce]") {
  // |U| <= gamma (1 + epsilon) n_hat < n_hat, so the sparsity clamp never fires here.
  const auto data = disjoint_cliques(2, 10);
  for (std::size_t n_hat = 1; n_hat <= 20; ++n_hat) {
    const auto out = lce(data.graph, n_hat, {0}, LceParams{3, 0.99, 0.5, 0.1});
    CHECK(out.removed.size() < n_hat);
    CHECK_FALSE(out.sparsity_clamped);
  }
}

TEST_CASE("lce on a symmetric SBM reaches Jaccard 0.75 on average", "[lce]") {
  double total = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(1234, static_cast<std::uint64_t>(t));
    const auto data = symmetric_sbm(3, 200, rng);
    const auto truth = truth_clusters(data.labels);
    std::uniform_int_distribution<std::size_t> pick(0, truth[0].size() - 1);
    const auto out = lce(data.graph, 200, {truth[0][pick(rng)]});
    total += jaccard(out.cluster, truth[0]);
  }
  CHECK(total / trials >= 0.75);
}
