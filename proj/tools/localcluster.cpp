// localcluster command-line driver: generate | cluster | eval | bench

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "localcluster/localcluster.hpp"

namespace lc = localcluster;
using lc::Json;

namespace {

struct Common {
  std::string output;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
  bool no_meta = false;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      lc::detail::require(file_.good(), "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  lc::detail::require(in.good(), "cannot open '" + path + "'");
  return in;
}

lc::NodeSet parse_seed_list(const std::string& text) {
  std::vector<lc::NodeId> ids;
  for (auto part : lc::detail::split(text, ',')) {
    if (part.empty()) continue;
    const auto v = lc::detail::parse_number<lc::NodeId>(part);
    lc::detail::require(v.has_value(), "bad seed '" + std::string(part) + "'");
    ids.push_back(*v);
  }
  lc::detail::require(!ids.empty(), "seed list is empty");
  return lc::NodeSet(std::move(ids));
}

Json meta(std::chrono::steady_clock::time_point start, std::size_t threads) {
  return Json{{"wall_seconds", lc::seconds_since(start)}, {"threads", threads}};
}

// Comment block put at the top of text outputs.
void write_config_comment(std::ostream& out, const Json& config) { out << "# config: " << config.dump() << '\n'; }

void write_graph_files(const std::string& prefix, const lc::Graph& g, const std::vector<int>* labels,
                       const Json& config) {
  {
    Output out(prefix + ".edges.tsv");
    write_config_comment(out.stream(), config);
    lc::write_edge_list(out.stream(), g);
  }
  if (labels) {
    Output out(prefix + ".labels.csv");
    write_config_comment(out.stream(), config);
    lc::write_labels(out.stream(), *labels);
  }
}

void write_feature_file(const std::string& path, const lc::FeatureMatrix& f, const Json& config) {
  Output out(path);
  write_config_comment(out.stream(), config);
  lc::write_features(out.stream(), f);
}

lc::Graph load_graph(const std::string& path) {
  auto in = open_input(path);
  return lc::read_edge_list(in, {}, lc::GraphOptions{.allow_self_loops = true});
}

std::vector<int> load_labels(const std::string& path) {
  auto in = open_input(path);
  return lc::read_labels(in);
}

lc::FeatureMatrix load_features(const std::string& path) {
  auto in = open_input(path);
  return lc::read_features(in);
}

void add_lce_options(CLI::App* app, lc::LceParams& p) {
  app->add_option("--walk-depth", p.walk_depth, "Random-walk steps t")->capture_default_str();
  app->add_option("--epsilon", p.epsilon, "Candidate inflation, |Omega| = (1+eps) n_hat")->capture_default_str();
  app->add_option("--gamma", p.gamma, "Removal fraction")->capture_default_str();
  app->add_option("--rejection", p.rejection, "Threshold R on the recovered vector")->capture_default_str();
}

std::string fmt(double v) { return lc::format_short(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local clustering via compressive sensing: generators, pipelines, metrics and benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "localcluster 0.1.0");

  Common common;
  std::function<void()> action;
  const auto start = std::chrono::steady_clock::now();

  auto add_common = [&](CLI::App* sub, bool with_seed = true) {
    sub->add_option("--output,-o", common.output, "Output path (stdout when omitted)");
    sub->add_option("--threads", common.threads, "Worker threads (default: LOCALCLUSTER_THREADS or all cores)");
    if (with_seed) sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_flag("--no-meta", common.no_meta, "Omit wall-clock and thread info so output is reproducible byte for byte");
  };

  // ---------------------------------------------------------------- generate
  auto* generate = app.add_subcommand("generate", "Write synthetic graphs or feature sets");
  generate->require_subcommand(1);

  std::size_t gen_k = 3, gen_n1 = 200;
  auto* gen_sbm = generate->add_subcommand("sbm", "Symmetric SBM, p = 5 ln(k n1)/(k n1), q = ln(k n1)/(k n1)");
  gen_sbm->add_option("--k", gen_k, "Number of blocks")->capture_default_str();
  gen_sbm->add_option("--n1", gen_n1, "Block size")->capture_default_str();
  add_common(gen_sbm);
  gen_sbm->callback([&] {
    action = [&] {
      auto rng = lc::make_rng(common.seed);
      const auto data = lc::symmetric_sbm(gen_k, gen_n1, rng);
      const Json config{{"command", "generate sbm"}, {"k", gen_k}, {"n1", gen_n1}, {"seed", common.seed}};
      write_graph_files(common.output.empty() ? "sbm" : common.output, data.graph, &data.labels, config);
    };
  });

  auto* gen_general = generate->add_subcommand("sbm-general", "SBM with blocks (n1, 2 n1, 5 n1)");
  gen_general->add_option("--n1", gen_n1, "Smallest block size")->capture_default_str();
  add_common(gen_general);
  gen_general->callback([&] {
    action = [&] {
      auto rng = lc::make_rng(common.seed);
      const auto data = lc::general_sbm(gen_n1, rng);
      const Json config{{"command", "generate sbm-general"}, {"n1", gen_n1}, {"seed", common.seed}};
      write_graph_files(common.output.empty() ? "sbm_general" : common.output, data.graph, &data.labels, config);
    };
  });

  std::string geo_kind = "three_lines";
  lc::GeometricOptions geo_opt;
  auto* gen_geo = generate->add_subcommand("geometric", "Three lines / circles / moons in R^dim with Gaussian noise");
  gen_geo->add_option("--kind", geo_kind, "three_lines | three_circles | three_moons")->capture_default_str();
  gen_geo->add_option("--noise", geo_opt.noise, "Noise standard deviation per coordinate")->capture_default_str();
  gen_geo->add_option("--dim", geo_opt.dim, "Ambient dimension")->capture_default_str();
  add_common(gen_geo);
  gen_geo->callback([&] {
    action = [&] {
      const auto kind = lc::parse_geometric_kind(geo_kind);
      auto rng = lc::make_rng(common.seed);
      const auto f = lc::geometric_dataset(kind, rng, geo_opt);
      const Json config{{"command", "generate geometric"}, {"kind", lc::to_string(kind)}, {"noise", geo_opt.noise},
                        {"dim", geo_opt.dim},                 {"seed", common.seed}};
      write_feature_file(common.output.empty() ? std::string(lc::to_string(kind)) + ".csv" : common.output, f, config);
    };
  });

  std::string knn_input, knn_sym = "product";
  lc::KnnParams knn;
  bool knn_exact = false;
  auto* gen_knn = generate->add_subcommand("knn-graph", "Gaussian-kernel K-NN affinity graph from a feature CSV");
  gen_knn->add_option("--input", knn_input, "Feature CSV")->required();
  gen_knn->add_option("--k", knn.k_neighbors, "Neighbors K")->capture_default_str();
  gen_knn->add_option("--r", knn.scale_rank, "Local scale rank r")->capture_default_str();
  gen_knn->add_option("--symmetrization", knn_sym, "product | max | average")->capture_default_str();
  gen_knn->add_flag("--exact", knn_exact, "Keep every entry of the product graph (no top-3K truncation)");
  add_common(gen_knn, false);
  gen_knn->callback([&] {
    action = [&] {
      knn.symmetrization = lc::parse_symmetrization(knn_sym);
      knn.truncate_product = !knn_exact;
      const auto f = load_features(knn_input);
      const auto g = lc::knn_affinity(f, knn);
      const Json config{{"command", "generate knn-graph"}, {"input", knn_input},          {"k", knn.k_neighbors},
                        {"r", knn.scale_rank},               {"symmetrization", knn_sym}, {"exact", knn_exact}};
      write_graph_files(common.output.empty() ? "knn" : common.output, g, f.has_labels() ? &f.labels : nullptr, config);
    };
  });

  std::string out_input;
  double out_fraction = 0.1;
  auto* gen_out = generate->add_subcommand("inject-outliers", "Append standard-normal rows labelled -1");
  gen_out->add_option("--input", out_input, "Feature CSV")->required();
  gen_out->add_option("--fraction", out_fraction, "Outliers as a fraction of the input rows")->capture_default_str();
  add_common(gen_out);
  gen_out->callback([&] {
    action = [&] {
      auto rng = lc::make_rng(common.seed);
      const auto f = lc::inject_outliers(load_features(out_input), out_fraction, rng);
      const Json config{{"command", "generate inject-outliers"}, {"input", out_input}, {"fraction", out_fraction},
                        {"seed", common.seed}};
      write_feature_file(common.output.empty() ? "outliers.csv" : common.output, f, config);
    };
  });

  // ----------------------------------------------------------------- cluster
  auto* cluster = app.add_subcommand("cluster", "Run LCE, SSLC, SSLC-multi or USLC on an edge-list graph");
  cluster->require_subcommand(1);
  std::string graph_path;
  std::vector<std::string> seed_args;
  std::size_t n_hat = 0;
  std::vector<std::size_t> sizes;
  std::size_t iters = 60;
  lc::LceParams lce_params;
  lc::UslcConfig uslc_cfg;
  double delta = 0.0;
  std::size_t max_clusters = 0;

  auto emit_result = [&](const std::string& algo, const lc::Graph& g, const Json& config,
                         const lc::ClusterAssignment& assignment, Json diagnostics) {
    Output out(common.output);
    if (common.format == "csv") {
      write_config_comment(out.stream(), config);
      if (!common.no_meta) out.stream() << "# meta: " << meta(start, 1).dump() << '\n';
      std::vector<int> owner(g.size(), lc::kOutlierLabel);
      for (std::size_t c = 0; c < assignment.clusters.size(); ++c)
        for (auto i : assignment.clusters[c]) owner[i] = static_cast<int>(c);
      out.stream() << "node_id,cluster\n";
      for (std::size_t i = 0; i < owner.size(); ++i) out.stream() << i << ',' << owner[i] << '\n';
      return;
    }
    Json j;
    j["command"] = "cluster " + algo;
    j["config"] = config;
    j["num_nodes"] = g.size();
    j["result"] = assignment;
    j["diagnostics"] = std::move(diagnostics);
    if (!common.no_meta) j["meta"] = meta(start, 1);
    out.stream() << j.dump(2) << '\n';
  };

  auto add_cluster_common = [&](CLI::App* sub) {
    sub->add_option("--graph", graph_path, "Edge-list file")->required();
    sub->add_option("--format", common.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    add_lce_options(sub, lce_params);
    add_common(sub);
  };
  auto base_config = [&](const std::string& algo) {
    return Json{{"algorithm", algo}, {"graph", graph_path}, {"seed", common.seed}, {"lce", lce_params}};
  };
  auto single_seed_set = [&]() {
    lc::detail::require(!seed_args.empty(), "--seeds is required for this algorithm");
    lc::detail::require(seed_args.size() == 1, "give one --seeds list (comma separated)");
    return parse_seed_list(seed_args[0]);
  };

  auto* cl_lce = cluster->add_subcommand("lce", "Single local cluster extraction");
  cl_lce->add_option("--seeds", seed_args, "Seed node ids, comma separated");
  cl_lce->add_option("--n-hat", n_hat, "Estimated cluster size")->required();
  add_cluster_common(cl_lce);
  cl_lce->callback([&] {
    action = [&] {
      const auto g = load_graph(graph_path);
      const auto seeds = single_seed_set();
      auto config = base_config("lce");
      config["seeds"] = seeds;
      config["n_hat"] = n_hat;
      const auto res = lc::lce(g, n_hat, seeds, lce_params);
      Json diag{{"omega_size", res.omega.size()}, {"removed", res.removed},
                {"residual", res.residual},       {"sp_iterations", res.sp_iterations},
                {"sparsity_clamped", res.sparsity_clamped}};
      lc::ClusterAssignment a{{res.cluster}, set_difference(lc::NodeSet::range(0, static_cast<lc::NodeId>(g.size())), res.cluster)};
      emit_result("lce", g, config, a, std::move(diag));
    };
  });

  auto* cl_sslc = cluster->add_subcommand("sslc", "Semi-supervised local clustering, one target cluster");
  cl_sslc->add_option("--seeds", seed_args, "Seed node ids, comma separated");
  cl_sslc->add_option("--n-hat", n_hat, "Estimated cluster size")->required();
  cl_sslc->add_option("--iters", iters, "Resampling probes")->capture_default_str();
  add_cluster_common(cl_sslc);
  cl_sslc->callback([&] {
    action = [&] {
      const auto g = load_graph(graph_path);
      const auto seeds = single_seed_set();
      auto config = base_config("sslc");
      config["seeds"] = seeds;
      config["n_hat"] = n_hat;
      config["iters"] = iters;
      lc::SslcConfig cfg;
      cfg.iterations = iters;
      cfg.lce = lce_params;
      auto rng = lc::make_rng(common.seed);
      const auto res = lc::sslc_single(g, seeds, n_hat, cfg, rng);
      Json diag{{"final_seeds", res.seeds}, {"lce_calls", res.lce_calls}, {"probes", res.probes}};
      lc::ClusterAssignment a{{res.cluster}, set_difference(lc::NodeSet::range(0, static_cast<lc::NodeId>(g.size())), res.cluster)};
      emit_result("sslc", g, config, a, std::move(diag));
    };
  });

  auto* cl_multi = cluster->add_subcommand("sslc-multi", "Semi-supervised local clustering, all targets at once");
  cl_multi->add_option("--seeds", seed_args, "Seed ids for one cluster, comma separated; repeat per cluster");
  cl_multi->add_option("--sizes", sizes, "Estimated size per cluster, comma separated")->delimiter(',')->required();
  cl_multi->add_option("--iters", iters, "Resampling probes")->capture_default_str();
  add_cluster_common(cl_multi);
  cl_multi->callback([&] {
    action = [&] {
      const auto g = load_graph(graph_path);
      lc::detail::require(!seed_args.empty(), "--seeds is required for sslc-multi (repeat it once per cluster)");
      std::vector<lc::NodeSet> seeds;
      for (const auto& s : seed_args) seeds.push_back(parse_seed_list(s));
      auto config = base_config("sslc-multi");
      config["seeds"] = seeds;
      config["sizes"] = sizes;
      config["iters"] = iters;
      lc::SslcConfig cfg;
      cfg.iterations = iters;
      cfg.lce = lce_params;
      auto rng = lc::make_rng(common.seed);
      const auto res = lc::sslc_multi(g, seeds, sizes, cfg, rng);
      Json diag{{"final_seeds", res.seeds},
                {"lce_calls", res.lce_calls},
                {"multi_pass_probes", res.multi_pass},
                {"conflicts", res.conflicts},
                {"probes", res.probes}};
      emit_result("sslc-multi", g, config, res.assignment, std::move(diag));
    };
  });

  auto* cl_uslc = cluster->add_subcommand("uslc", "Unsupervised local clustering");
  cl_uslc->add_option("--n-min", uslc_cfg.n_min, "Smallest cluster size of interest")->required();
  cl_uslc->add_option("--iters", uslc_cfg.iterations, "Probes per round")->capture_default_str();
  cl_uslc->add_option("--delta", delta, "Fixed co-membership threshold (default 0.5 (n_min/n)^2 per round)");
  cl_uslc->add_option("--max-clusters", max_clusters, "Stop after this many clusters");
  cl_uslc->add_flag("--literal-guard", uslc_cfg.literal_guard, "Loop while the remaining graph is smaller than n_min (inverted guard)");
  add_cluster_common(cl_uslc);
  cl_uslc->callback([&] {
    action = [&] {
      const auto g = load_graph(graph_path);
      if (cl_uslc->count("--delta")) uslc_cfg.delta = delta;
      if (cl_uslc->count("--max-clusters")) uslc_cfg.max_clusters = max_clusters;
      uslc_cfg.lce = lce_params;
      auto config = base_config("uslc");
      config["n_min"] = uslc_cfg.n_min;
      config["iters"] = uslc_cfg.iterations;
      config["delta"] = uslc_cfg.delta ? Json(*uslc_cfg.delta) : Json("auto");
      config["max_clusters"] = uslc_cfg.max_clusters ? Json(*uslc_cfg.max_clusters) : Json(nullptr);
      config["literal_guard"] = uslc_cfg.literal_guard;
      auto rng = lc::make_rng(common.seed);
      const auto res = lc::uslc(g, uslc_cfg, rng);
      Json diag{{"rounds", res.rounds}};
      emit_result("uslc", g, config, res.assignment, std::move(diag));
    };
  });

  // -------------------------------------------------------------------- eval
  auto* eval = app.add_subcommand("eval", "Score a cluster result against ground-truth labels");
  std::string result_path, labels_path, eval_graph, matching = "optimal";
  eval->add_option("--result", result_path, "Result JSON from `cluster`")->required();
  eval->add_option("--labels", labels_path, "Labels CSV (node_id,label)")->required();
  eval->add_option("--matching", matching, "optimal | identity")->check(CLI::IsMember({"optimal", "identity"}))->capture_default_str();
  eval->add_option("--graph", eval_graph, "Edge list; adds the spectral norm of L - L_in to the report");
  add_common(eval, false);
  eval->callback([&] {
    action = [&] {
      const auto labels = load_labels(labels_path);
      Json result;
      {
        auto in = open_input(result_path);
        try {
          result = Json::parse(in);
        } catch (const Json::parse_error& e) {
          throw lc::InvalidArgument("result file is not valid JSON: " + std::string(e.what()));
        }
      }
      if (result.contains("num_nodes")) {
        const auto n = result.at("num_nodes").get<std::size_t>();
        lc::detail::require(n == labels.size(), "node universes differ: result has " + std::to_string(n) +
                                                    " nodes, labels cover " + std::to_string(labels.size()));
      }
      const auto assignment = (result.contains("result") ? result.at("result") : result).get<lc::ClusterAssignment>();
      auto report = lc::evaluate(assignment, labels,
                                 matching == "identity" ? lc::MatchingMode::identity : lc::MatchingMode::optimal);
      if (!eval_graph.empty()) {
        const auto g = load_graph(eval_graph);
        report.delta_l_norm = lc::delta_l_spectral_norm(g, labels);
      }
      Json j;
      j["command"] = "eval";
      j["config"] = Json{{"result", result_path}, {"labels", labels_path}, {"matching", matching},
                         {"graph", eval_graph.empty() ? Json(nullptr) : Json(eval_graph)}};
      j["report"] = report;
      if (!common.no_meta) j["meta"] = meta(start, 1);
      Output out(common.output);
      out.stream() << j.dump(2) << '\n';
    };
  });

  // ------------------------------------------------------------------- bench
  auto* bench = app.add_subcommand("bench", "Reproduce the experiment tables as CSV");
  bench->require_subcommand(1);
  std::size_t trials = 20;
  bool quick = false;
  std::vector<std::size_t> bench_sizes;

  auto add_bench_common = [&](CLI::App* sub, std::size_t default_trials) {
    trials = default_trials;
    sub->add_option("--trials", trials, "Independent trials per row");
    sub->add_option("--format", common.format, "csv | json")->check(CLI::IsMember({"json", "csv"}));
    add_common(sub);
  };

  auto emit_table = [&](const Json& config, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows, std::size_t threads) {
    Output out(common.output);
    if (common.format == "json") {
      Json j;
      j["config"] = config;
      j["columns"] = header;
      j["rows"] = rows;
      if (!common.no_meta) j["meta"] = meta(start, threads);
      out.stream() << j.dump(2) << '\n';
      return;
    }
    write_config_comment(out.stream(), config);
    if (!common.no_meta) out.stream() << "# meta: " << meta(start, threads).dump() << '\n';
    for (std::size_t c = 0; c < header.size(); ++c) out.stream() << (c ? "," : "") << header[c];
    out.stream() << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) out.stream() << (c ? "," : "") << r[c];
      out.stream() << '\n';
    }
  };

  auto* b_sweep = bench->add_subcommand("sbm-sweep", "SSLC single vs multi on symmetric SBM over n1");
  add_bench_common(b_sweep, 20);
  b_sweep->add_option("--n1", bench_sizes, "Block sizes (default 200,400,600,800,1000)")->delimiter(',');
  b_sweep->add_option("--iters", iters, "Resampling probes (halved by --quick)");
  b_sweep->add_flag("--quick", quick, "Halve the probe budget");
  b_sweep->callback([&] {
    action = [&] {
      common.format = b_sweep->count("--format") ? common.format : "csv";
      const auto threads = lc::resolve_threads(common.threads ? std::optional(common.threads) : std::nullopt);
      lc::SslcSbmOptions opt;
      opt.iterations = quick ? std::max<std::size_t>(1, iters / 2) : iters;
      const auto n1s = bench_sizes.empty() ? lc::default_sweep_sizes() : bench_sizes;
      const auto rows = lc::sbm_sweep(n1s, trials, common.seed, opt, threads);
      Json config{{"command", "bench sbm-sweep"}, {"n1", n1s},         {"k", opt.k},
                  {"trials", trials},             {"iters", opt.iterations}, {"quick", quick},
                  {"seed", common.seed}};
      std::vector<std::string> header{"n1", "n", "trials", "single_jaccard_mean", "single_jaccard_std",
                                      "multi_jaccard_mean", "multi_jaccard_std"};
      if (!common.no_meta)
        for (const char* c : {"single_seconds_mean", "single_seconds_std", "multi_seconds_mean", "multi_seconds_std"})
          header.emplace_back(c);
      std::vector<std::vector<std::string>> table;
      for (const auto& r : rows) {
        std::vector<std::string> row{std::to_string(r.n1), std::to_string(r.n1 * opt.k), std::to_string(r.trials),
                                     fmt(r.single_jaccard.mean), fmt(r.single_jaccard.std),
                                     fmt(r.multi_jaccard.mean), fmt(r.multi_jaccard.std)};
        if (!common.no_meta) {
          for (double v : {r.single_seconds.mean, r.single_seconds.std, r.multi_seconds.mean, r.multi_seconds.std})
            row.push_back(fmt(v));
        }
        table.push_back(std::move(row));
      }
      emit_table(config, header, table, threads);
    };
  });

  auto* b_delta = bench->add_subcommand("delta-l-table", "Jaccard, spectral norm of L - L_in and SNR on SSBM(n, 3, 6 ln n/n, ln n/n)");
  add_bench_common(b_delta, 20);
  b_delta->add_option("--n", bench_sizes, "Graph sizes (default 100,200,400,800)")->delimiter(',');
  b_delta->add_option("--iters", iters, "SSLC probes for the Jaccard column (0 skips it)");
  b_delta->callback([&] {
    action = [&] {
      common.format = b_delta->count("--format") ? common.format : "csv";
      const auto threads = lc::resolve_threads(common.threads ? std::optional(common.threads) : std::nullopt);
      lc::DeltaLOptions opt;
      if (!bench_sizes.empty()) opt.sizes = bench_sizes;
      opt.iterations = iters;
      const auto rows = lc::delta_l_table(trials, common.seed, opt, threads);
      Json config{{"command", "bench delta-l-table"}, {"n", opt.sizes}, {"k", opt.k}, {"a", opt.a},
                  {"b", opt.b}, {"trials", trials}, {"iters", opt.iterations}, {"seed", common.seed}};
      std::vector<std::string> header{"n",          "trials",       "jaccard_mean", "jaccard_std",
                                      "delta_l_mean", "delta_l_std", "snr"};
      std::vector<std::vector<std::string>> table;
      for (const auto& r : rows) {
        char snr[32];
        std::snprintf(snr, sizeof snr, "%.2f", r.snr);
        table.push_back({std::to_string(r.n), std::to_string(r.trials), fmt(r.jaccard.mean), fmt(r.jaccard.std),
                         fmt(r.delta_l.mean), fmt(r.delta_l.std), snr});
      }
      emit_table(config, header, table, threads);
    };
  });

  auto* b_geo = bench->add_subcommand("geometric", "SSLC-multi accuracy with one label per class on the three shapes");
  add_bench_common(b_geo, 20);
  lc::GeometricBenchOptions geo_bench;
  std::string geo_sym = "product";
  b_geo->add_option("--iters", geo_bench.iterations, "Resampling probes")->capture_default_str();
  b_geo->add_option("--k", geo_bench.knn.k_neighbors, "Neighbors K")->capture_default_str();
  b_geo->add_option("--r", geo_bench.knn.scale_rank, "Local scale rank r")->capture_default_str();
  b_geo->add_option("--symmetrization", geo_sym, "product | max | average")->capture_default_str();
  b_geo->callback([&] {
    action = [&] {
      common.format = b_geo->count("--format") ? common.format : "csv";
      geo_bench.knn.symmetrization = lc::parse_symmetrization(geo_sym);
      const auto threads = lc::resolve_threads(common.threads ? std::optional(common.threads) : std::nullopt);
      const auto rows = lc::geometric_bench(trials, common.seed, geo_bench, threads);
      Json config{{"command", "bench geometric"},    {"trials", trials},
                  {"iters", geo_bench.iterations},   {"labels_per_class", geo_bench.labels_per_class},
                  {"k", geo_bench.knn.k_neighbors},  {"r", geo_bench.knn.scale_rank},
                  {"symmetrization", geo_sym},       {"noise", geo_bench.data.noise},
                  {"dim", geo_bench.data.dim},       {"seed", common.seed}};
      std::vector<std::string> header{"dataset", "trials", "accuracy_mean", "accuracy_std"};
      if (!common.no_meta) header.emplace_back("seconds_mean");
      std::vector<std::vector<std::string>> table;
      for (const auto& r : rows) {
        std::vector<std::string> row{std::string(lc::to_string(r.kind)), std::to_string(r.trials),
                                     fmt(r.accuracy.mean), fmt(r.accuracy.std)};
        if (!common.no_meta) row.push_back(fmt(r.seconds.mean));
        table.push_back(std::move(row));
      }
      emit_table(config, header, table, threads);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (action) action();
  } catch (const lc::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const lc::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed result file: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
