#pragma once

// Private helpers shared by the core translation units.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace fscap::detail {

inline constexpr double kLn2 = 0.69314718055994530942;

/// x log2 x with 0 log 0 = 0.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}

using Adjacency = std::vector<std::vector<int>>;

/// Strongly connected components (iterative Tarjan). Returns component id per node.
std::vector<int> strongly_connected_components(const Adjacency& adj, int& component_count);

/// Components with no edge leaving them, as sorted node lists.
std::vector<std::vector<int>> closed_classes(const Adjacency& adj);

/// Nodes reachable from `start` (including it).
std::vector<bool> reachable_from(const Adjacency& adj, int start);

/// Period of the strongly connected node set `members` (gcd of cycle lengths via BFS levels).
std::size_t period_of(const Adjacency& adj, const std::vector<int>& members);

/// Euclidean projection of v onto the probability simplex restricted to `mask`
/// (entries outside the mask are forced to zero).
void project_to_simplex(std::span<double> v, std::span<const char> mask);

}  // namespace fscap::detail
