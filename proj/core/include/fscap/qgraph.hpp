#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fscap/channels.hpp"

namespace fscap {

/**
 * Directed graph with |Y| labeled out-edges per node, stored as the function
 * table phi(q, y) in q-major order.
 *
 * Construct through make_qgraph() (or the named builders) to get the
 * structural checks: phi total, every node reachable from node 0, and a single
 * closed communicating class once labels are dropped.
 */
struct QGraph {
  std::string name;
  std::size_t node_count = 0;
  std::size_t output_count = 0;
  std::vector<int> phi;

  int next(std::size_t q, std::size_t y) const { return phi[q * output_count + y]; }

  friend bool operator==(const QGraph& a, const QGraph& b) {
    return a.node_count == b.node_count && a.output_count == b.output_count && a.phi == b.phi;
  }
};

/// Checked constructor. Throws InvalidArgument naming the first broken invariant.
QGraph make_qgraph(std::size_t node_count, std::size_t output_count, std::vector<int> phi, std::string name = {});

/// Node (y_1..y_k) goes to (y_2..y_k, y); nodes are numbered base |Y| with y_1 most significant.
QGraph markov_qgraph(int k, std::size_t output_count);

/// The 4-node graph of the trapdoor encoder (same table as markov_qgraph(2, 2)).
QGraph appendix_a_qgraph();

/// The 8-node graph used with the dicode erasure channel; outputs ordered [-1, 0, 1, ?].
QGraph appendix_c_qgraph();

/// "markov:k=<int>", "appendixA" or "appendixC". Throws InvalidArgument when the
/// name is unknown or the graph's output alphabet does not match `output_count`.
QGraph qgraph_from_name(const std::string& name, std::size_t output_count);

/// Follows the labeled edges from q0. Throws InvalidArgument on an out-of-range symbol.
int map_sequence(const QGraph& g, int q0, std::span<const int> outputs);

bool is_strongly_connected(const QGraph& g);

/// Lexicographically smallest phi table over all node relabelings.
QGraph canonical(const QGraph& g);

/**
 * Streams every strongly connected Q-graph with `node_count` nodes, one per
 * isomorphism class, each in canonical() form. `visit` returns false to stop
 * early. Returns the number of graphs visited.
 */
std::size_t enumerate_qgraphs(std::size_t node_count, std::size_t output_count,
                              const std::function<bool(const QGraph&)>& visit);

std::vector<QGraph> enumerate_qgraphs(std::size_t node_count, std::size_t output_count);

/// Conditional input law P(x|s,q), stored with index (s*|Q| + q)*|X| + x.
struct InputPolicy {
  std::size_t state_count = 0;
  std::size_t node_count = 0;
  std::size_t input_count = 0;
  std::vector<double> prob;

  std::size_t pair(std::size_t s, std::size_t q) const { return s * node_count + q; }
  double at(std::size_t s, std::size_t q, std::size_t x) const { return prob[pair(s, q) * input_count + x]; }
  std::span<const double> row(std::size_t z) const { return {prob.data() + z * input_count, input_count}; }
  std::span<double> row(std::size_t z) { return {prob.data() + z * input_count, input_count}; }

  friend bool operator==(const InputPolicy&, const InputPolicy&) = default;
};

/// Uniform over the admissible inputs of each state.
InputPolicy uniform_policy(const UnifilarFsc& channel, const QGraph& g);

/// Throws InvalidArgument when shapes disagree, a row does not sum to 1, or mass sits on an inadmissible input.
void require_valid_policy(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

/// The (S,Q) Markov chain induced by a channel, a Q-graph and an input policy. Pairs are indexed z = s*|Q| + q.
struct SqChain {
  std::size_t state_count = 0;
  std::size_t node_count = 0;
  std::vector<double> transition;  ///< dense row-major, size (|S||Q|)^2
  std::vector<std::vector<int>> closed_classes;
  std::vector<bool> aperiodic;  ///< one flag per closed class

  std::size_t size() const { return state_count * node_count; }
  double at(std::size_t from, std::size_t to) const { return transition[from * size() + to]; }
};

SqChain build_sq_chain(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

/**
 * Stationary distribution over z = s*|Q| + q, zero outside the closed class.
 * Throws MultichainError or PeriodicError when the chain is not unichain and aperiodic.
 */
std::vector<double> stationary(const SqChain& chain);

/// max_j |(pi^T P)_j - pi_j|.
double stationary_residual(const SqChain& chain, std::span<const double> pi);

}  // namespace fscap
