#pragma once

#include <json.hpp>

#include "localcluster/error.hpp"
#include "localcluster/lce.hpp"
#include "localcluster/metrics.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/pipelines.hpp"

namespace localcluster {

using Json = nlohmann::ordered_json;

inline void to_json(Json& j, const NodeSet& s) { j = s.vector(); }

inline void from_json(const Json& j, NodeSet& s) {
  detail::require(j.is_array(), "expected an array of node ids");
  std::vector<NodeId> ids;
  for (const auto& e : j) {
    detail::require(e.is_number_unsigned(), "node ids must be nonnegative integers");
    ids.push_back(e.get<NodeId>());
  }
  s = NodeSet(std::move(ids));
}

inline void to_json(Json& j, const ClusterAssignment& a) {
  j = Json::object();
  j["clusters"] = Json::array();
  for (const auto& c : a.clusters) j["clusters"].push_back(c);
  j["outliers"] = a.outliers;
}

inline void from_json(const Json& j, ClusterAssignment& a) {
  detail::require(j.is_object() && j.contains("clusters"), "result has no 'clusters' field");
  a.clusters.clear();
  for (const auto& c : j.at("clusters")) a.clusters.push_back(c.get<NodeSet>());
  a.outliers = j.contains("outliers") ? j.at("outliers").get<NodeSet>() : NodeSet{};
}

inline void to_json(Json& j, const LceParams& p) {
  j = Json{{"walk_depth", p.walk_depth}, {"epsilon", p.epsilon}, {"gamma", p.gamma}, {"rejection", p.rejection}};
}

inline void to_json(Json& j, const EvalReport& r) {
  j = Json::object();
  j["accuracy"] = r.accuracy;
  j["jaccard"] = r.jaccard;
  j["matching"] = r.matching;
  j["counted_nodes"] = r.counted_nodes;
  j["correct_nodes"] = r.correct_nodes;
  j["denominator"] = r.denominator;
  j["delta_l_norm"] = r.delta_l_norm ? Json(*r.delta_l_norm) : Json(nullptr);
  j["snr"] = r.snr ? Json(*r.snr) : Json(nullptr);
}

inline void to_json(Json& j, const SslcProbe& p) {
  j = Json{{"node", p.node}, {"probe_size", p.probe_size}, {"overlaps", p.overlaps}, {"accepted", p.accepted}};
}

inline void to_json(Json& j, const UslcRound& r) {
  j = Json{{"remaining", r.remaining},       {"active", r.active},
           {"delta", r.delta},               {"m_nonzeros", r.m_nonzeros},
           {"m_trace", r.m_trace},           {"m_max_offdiag", r.m_max_offdiag},
           {"pivot", r.pivot ? Json(*r.pivot) : Json(nullptr)}, {"cluster_size", r.cluster_size}};
}

}  // namespace localcluster
