#pragma once

#include <cstdint>
#include <string>

// Named bound computations shared by `fscap sweep` and `fscap reproduce`.
namespace fscap::app {

/**
 * A parsed method name. Accepted forms:
 *   dec-fb                         DEC feedback capacity
 *   analytic-thm                   closed-form theorem bound of the channel family
 *   <kind>[-<graph>][-d<delay>]    kind is qgraph-ub, dual-ub or bcjr-lb;
 *                                  graph is markov<k>, appendixA or appendixC
 * Missing graph or delay parts fall back to the sweep defaults.
 */
struct MethodSpec {
  std::string name;
  std::string kind;   ///< dec-fb, analytic-thm, qgraph-ub, dual-ub, bcjr-lb
  std::string graph;  ///< Q-graph name as accepted by qgraph_from_name, empty if unused
  int delay = 1;
};

/// Throws InvalidArgument on an unknown form.
MethodSpec parse_method(const std::string& name, const std::string& default_graph, int default_delay);

struct MethodOptions {
  std::uint64_t seed = 1;
  std::size_t random_starts = 16;
};

/// Outcome of one method at one parameter value. `status` is "ok", "unconverged" or "error: ...".
struct MethodResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::string status = "ok";
};

/// Channel name for a family ("trapdoor", "bsc-rll", "dec") at parameter p.
std::string channel_name(const std::string& family, double p);

/// Evaluates a method. Failures are reported through `status`; this never throws.
MethodResult evaluate_method(const std::string& family, double p, const MethodSpec& method, const MethodOptions& opts);

}  // namespace fscap::app
