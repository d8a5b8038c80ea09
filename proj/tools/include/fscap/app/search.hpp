#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fscap/delay.hpp"
#include "fscap/graph_bounds.hpp"
#include "fscap/qgraph.hpp"

namespace fscap::app {

struct SearchOptions {
  std::size_t max_nodes = 3;
  std::size_t random_starts = 2;  ///< per graph, on top of the uniform start
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::size_t lower_candidates = 0;  ///< graphs with the smallest UBs tried for a BCJR lower bound
};

struct GraphScore {
  QGraph graph;
  double upper = 0.0;
  bool converged = false;
  std::string status;  ///< "ok", "unconverged" or "error: ..."
};

struct SearchResult {
  std::vector<GraphScore> scores;  ///< enumeration order
  std::optional<BoundReport> best_upper;
  QGraph best_upper_graph;
  std::optional<BoundReport> best_lower;
  QGraph best_lower_graph;
};

/**
 * Evaluates upper_bound on every enumerated Q-graph with up to max_nodes nodes
 * and keeps the smallest. With lower_candidates > 0, the graphs with the
 * smallest bounds are also handed to find_bcjr_policy (seeded with their UB
 * policy) and the best certified lower bound is kept.
 */
SearchResult search_qgraphs(const TransformedChannel& channel, const SearchOptions& opts);

/// Same over the Markov graphs of order 1..max_order.
SearchResult search_markov(const TransformedChannel& channel, int max_order, const SearchOptions& opts);

}  // namespace fscap::app
