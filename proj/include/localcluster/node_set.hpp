#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "localcluster/error.hpp"

namespace localcluster {

using NodeId = std::uint32_t;

/// Sorted, duplicate-free set of node indices.
class NodeSet {
public:
  using const_iterator = std::vector<NodeId>::const_iterator;

  NodeSet() = default;
  NodeSet(std::initializer_list<NodeId> ids) : NodeSet(std::vector<NodeId>(ids)) {}
  explicit NodeSet(std::vector<NodeId> ids) : members_(std::move(ids)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  static NodeSet range(NodeId first, NodeId last) {
    std::vector<NodeId> ids;
    ids.reserve(last > first ? last - first : 0);
    for (NodeId i = first; i < last; ++i) ids.push_back(i);
    return NodeSet(std::move(ids));
  }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const_iterator begin() const noexcept { return members_.begin(); }
  const_iterator end() const noexcept { return members_.end(); }
  NodeId operator[](std::size_t i) const { return members_[i]; }
  std::span<const NodeId> ids() const noexcept { return members_; }
  const std::vector<NodeId>& vector() const noexcept { return members_; }

  bool contains(NodeId id) const {
    return std::binary_search(members_.begin(), members_.end(), id);
  }

  /// Throws if any member is outside [0, n).
  void check_range(std::size_t n, const char* what = "node set") const {
    if (!members_.empty() && members_.back() >= n) {
      throw InvalidArgument(std::string(what) + ": node " + std::to_string(members_.back()) +
                            " out of range for graph with " + std::to_string(n) + " nodes");
    }
  }

  void insert(NodeId id) {
    auto it = std::lower_bound(members_.begin(), members_.end(), id);
    if (it == members_.end() || *it != id) members_.insert(it, id);
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
  std::vector<NodeId> members_;
};

inline std::size_t intersection_size(const NodeSet& a, const NodeSet& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  std::vector<NodeId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return NodeSet(std::move(out));
}

inline NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  std::vector<NodeId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return NodeSet(std::move(out));
}

inline bool is_subset(const NodeSet& sub, const NodeSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace localcluster
