#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"

using namespace localcluster;
using namespace testing_support;

TEST_CASE("edge list round trip keeps weights exactly", "[io]") {
  const auto g = build_graph({{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {2, 5, 7.25}}, 7);
  std::stringstream buf;
  write_edge_list(buf, g);
  const auto back = read_edge_list(buf);
  CHECK(back.size() == 7);
  CHECK(dense_adjacency(back) == dense_adjacency(g));
}

TEST_CASE("edge list reader accepts comments, spaces and default weights", "[io]") {
  std::istringstream in("# a comment\n0 1\n\n1\t2\t2.5\n# nodes 9\n");
  const auto g = read_edge_list(in);
  CHECK(g.size() == 9);
  CHECK(g.weight(0, 1) == 1.0);
  CHECK(g.weight(2, 1) == 2.5);
}

TEST_CASE("edge list reader rejects malformed rows", "[io]") {
  std::istringstream bad_fields("0 1 2 3\n");
  CHECK_THROWS_AS(read_edge_list(bad_fields), InvalidArgument);
  std::istringstream bad_id("0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad_id), InvalidArgument);
  std::istringstream negative("0 1 -2\n");
  CHECK_THROWS_AS(read_edge_list(negative), InvalidArgument);
}

TEST_CASE("labels round trip and validation", "[io]") {
  const std::vector<int> labels{0, 2, -1, 1};
  std::stringstream buf;
  write_labels(buf, labels);
  CHECK(read_labels(buf) == labels);

  std::istringstream gap("0,1\n2,1\n");
  CHECK_THROWS_AS(read_labels(gap), InvalidArgument);
  std::istringstream dup("0,1\n0,1\n1,0\n");
  CHECK_THROWS_AS(read_labels(dup), InvalidArgument);
}

TEST_CASE("features round trip with and without labels", "[io]") {
  auto rng = make_rng(3);
  GeometricOptions opt;
  opt.dim = 4;
  const auto f = geometric_dataset(GeometricKind::three_moons, rng, opt);
  std::stringstream buf;
  write_features(buf, f);
  const auto back = read_features(buf);
  CHECK(back.values == f.values);
  CHECK(back.labels == f.labels);

  std::istringstream bare("1,2\n3,4\n");
  const auto plain = read_features(bare);
  CHECK(plain.rows() == 2);
  CHECK_FALSE(plain.has_labels());

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_features(ragged), InvalidArgument);
}

TEST_CASE("cluster assignment JSON round trip", "[io]") {
  const ClusterAssignment a{{{0, 4}, {2, 3}}, {1}};
  const Json j = a;
  CHECK(j.dump() == R"({"clusters":[[0,4],[2,3]],"outliers":[1]})");
  const auto back = j.get<ClusterAssignment>();
  CHECK(back.clusters == a.clusters);
  CHECK(back.outliers == a.outliers);
  CHECK_THROWS_AS(Json::parse(R"({"clusters":[[-1]]})").get<ClusterAssignment>(), InvalidArgument);
}

TEST_CASE("number formatting", "[io]") {
  CHECK(format_short(1.0 / 3.0) == "0.333333");
  CHECK(format_exact(0.1) == "0.1");
  CHECK(std::stod(format_exact(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("run_trials keeps trial order and rethrows", "[io]") {
  const auto out = run_trials(17, 4, [](std::size_t t) { return static_cast<int>(t * t); });
  for (std::size_t t = 0; t < 17; ++t) CHECK(out[t] == static_cast<int>(t * t));
  CHECK_THROWS_AS(run_trials(5, 2,
                             [](std::size_t t) {
                               if (t == 3) throw NumericError("boom");
                               return 0;
                             }),
                  NumericError);
}

TEST_CASE("trial streams are independent of thread count", "[io]") {
  auto draw = [](std::size_t threads) {
    return run_trials(8, threads, [](std::size_t t) {
      auto rng = trial_rng(77, t);
      return rng();
    });
  };
  CHECK(draw(1) == draw(3));
}
