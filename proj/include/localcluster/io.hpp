#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "localcluster/datagen.hpp"
#include "localcluster/error.hpp"
#include "localcluster/graph.hpp"

namespace localcluster {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || p != end) return std::nullopt;
  return value;
}

inline std::string where(std::string_view what, std::size_t line) {
  return std::string(what) + " line " + std::to_string(line) + ": ";
}

}  // namespace detail

/// Shortest text that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// 6 significant digits, as used in bench tables.
inline std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// `u<TAB>v[<TAB>w]` per line; `#` starts a comment line.
inline Graph read_edge_list(std::istream& in, std::optional<std::size_t> num_nodes = {}, GraphOptions opt = {}) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      // "# nodes N" keeps trailing isolated nodes.
      const auto f = detail::split_whitespace(t.substr(1));
      if (!num_nodes && f.size() == 2 && f[0] == "nodes") num_nodes = detail::parse_number<std::size_t>(f[1]);
      continue;
    }
    const auto f = detail::split_whitespace(t);
    detail::require(f.size() == 2 || f.size() == 3,
                    detail::where("edge list", lineno) + "expected `u v [w]`, got " + std::to_string(f.size()) + " fields");
    const auto u = detail::parse_number<NodeId>(f[0]);
    const auto v = detail::parse_number<NodeId>(f[1]);
    detail::require(u && v, detail::where("edge list", lineno) + "node ids must be nonnegative integers");
    double w = 1.0;
    if (f.size() == 3) {
      const auto pw = detail::parse_number<double>(f[2]);
      detail::require(pw.has_value(), detail::where("edge list", lineno) + "bad weight '" + std::string(f[2]) + "'");
      w = *pw;
    }
    edges.push_back({*u, *v, w});
  }
  return build_graph(edges, num_nodes, opt);
}

/// Writes each undirected edge once (u <= v), with the graph's original ids.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.size() << "\n";
  for (const auto& e : g.edges())
    out << g.original_id(e.u) << '\t' << g.original_id(e.v) << '\t' << format_exact(e.weight) << '\n';
}

inline std::vector<int> read_labels(std::istream& in) {
  std::vector<std::pair<NodeId, int>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = detail::split(t, ',');
    detail::require(f.size() == 2, detail::where("labels", lineno) + "expected `node_id,label`");
    const auto id = detail::parse_number<NodeId>(f[0]);
    const auto label = detail::parse_number<int>(f[1]);
    if (!id && f[0] == "node_id") continue;
    detail::require(id && label, detail::where("labels", lineno) + "bad row '" + std::string(t) + "'");
    rows.emplace_back(*id, *label);
  }
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max<std::size_t>(n, r.first + 1);
  detail::require(rows.size() == n, "labels: expected one row for each node 0.." + std::to_string(n ? n - 1 : 0));
  std::vector<int> labels(n, 0);
  std::vector<char> seen(n, 0);
  for (const auto& [id, l] : rows) {
    detail::require(!seen[id], "labels: node " + std::to_string(id) + " listed twice");
    seen[id] = 1;
    labels[id] = l;
  }
  return labels;
}

inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  out << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

/// Header row `x0,...,x{d-1}[,label]`, then one point per row.
inline void write_features(std::ostream& out, const FeatureMatrix& f) {
  for (std::size_t j = 0; j < f.dim(); ++j) out << (j ? "," : "") << 'x' << j;
  if (f.has_labels()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.dim(); ++j)
      out << (j ? "," : "") << format_exact(f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    if (f.has_labels()) out << ',' << f.labels[i];
    out << '\n';
  }
}

/// Reads the feature CSV. A header is optional; a final column named `label` holds labels.
inline FeatureMatrix read_features(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool has_label = false;
  std::optional<std::size_t> width;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = detail::split(t, ',');
    if (!width && !detail::parse_number<double>(f[0])) {
      has_label = f.back() == "label";
      width = f.size();
      continue;
    }
    if (!width) width = f.size();
    detail::require(f.size() == *width, detail::where("features", lineno) + "expected " + std::to_string(*width) +
                                            " columns, got " + std::to_string(f.size()));
    std::vector<double> row;
    const std::size_t nf = has_label ? f.size() - 1 : f.size();
    for (std::size_t j = 0; j < nf; ++j) {
      const auto v = detail::parse_number<double>(f[j]);
      detail::require(v.has_value(), detail::where("features", lineno) + "bad value '" + std::string(f[j]) + "'");
      row.push_back(*v);
    }
    if (has_label) {
      const auto l = detail::parse_number<int>(f.back());
      detail::require(l.has_value(), detail::where("features", lineno) + "bad label '" + std::string(f.back()) + "'");
      labels.push_back(*l);
    }
    rows.push_back(std::move(row));
  }
  FeatureMatrix out;
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  out.labels = std::move(labels);
  out.validate();
  return out;
}

}  // namespace localcluster
