#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace localcluster {

/// Positions of the `count` largest |values| (capped at values.size()),
/// returned in rank order. Equal magnitudes rank by ascending position.
inline std::vector<std::size_t> largest_magnitude(std::span<const double> values, std::size_t count) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double x = std::abs(values[a]);
                      const double y = std::abs(values[b]);
                      return x > y || (x == y && a < b);
                    });
  order.resize(count);
  return order;
}

/// Positions of the `count` smallest values, ties by ascending position.
inline std::vector<std::size_t> smallest_values(std::span<const double> values, std::size_t count) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] < values[b] || (values[a] == values[b] && a < b);
                    });
  order.resize(count);
  return order;
}

/// floor(x) that tolerates representation error just below an integer.
inline std::size_t floor_count(double x) {
  if (!(x > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(x + 1e-9));
}

}  // namespace localcluster
