#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fscap/channels.hpp"
#include "fscap/delay.hpp"
#include "fscap/qgraph.hpp"

namespace fscap {

/// Stationary quantities behind one rate evaluation.
struct RateEvaluation {
  double rate = 0.0;                       ///< I(X,S;Y|Q) in bits
  std::vector<double> pi;                  ///< pi(s,q), index s*|Q| + q
  std::vector<double> node_marginal;       ///< pi(q)
  std::vector<double> output_given_node;   ///< P(y|q), q-major; uniform at nodes with pi(q) = 0
  double stationarity_residual = 0.0;
};

/// Evaluates the Q-graph rate of a policy. Propagates stationary() errors.
RateEvaluation evaluate_rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

double rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

/**
 * Gradient of rate() with respect to the policy entries, same layout as
 * InputPolicy::prob. Only its component tangent to the product of simplices
 * is meaningful; entries for inadmissible inputs are zero.
 */
std::vector<double> rate_gradient(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

/**
 * Largest |pi(s+|q+) - Bayes posterior of s+ after observing y at node q| over
 * all (q, y) that occur with positive probability. Zero means the policy is
 * BCJR-invariant.
 */
double bcjr_residual(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

enum class BoundKind { upper, lower, monte_carlo };

const char* to_string(BoundKind kind);

struct BoundReport {
  std::string channel_id;
  int delay = 1;
  std::string qgraph_id;
  BoundKind kind = BoundKind::upper;
  double value = 0.0;  ///< bits per channel use
  InputPolicy policy;
  double bcjr_residual = 0.0;
  double stationarity_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t multistart_count = 0;
  std::vector<double> output_given_node;  ///< P(y|q) at the reported policy
  double ci_half_width = 0.0;             ///< Monte Carlo only
  std::string diagnostic;
};

/// Certified achievable rate of a BCJR-invariant policy. Throws NotConverged("not BCJR-invariant ...") above `tol`.
BoundReport lower_bound(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, double tol = 1e-9);
BoundReport lower_bound(const TransformedChannel& channel, const QGraph& g, const InputPolicy& policy, double tol = 1e-9);

struct UpperBoundOptions {
  std::size_t random_starts = 16;
  bool uniform_start = true;
  std::uint64_t seed = 1;
  double tol = 1e-9;  ///< on the simplex-projected gradient norm
  std::size_t max_iter = 100000;
  unsigned threads = 1;
  std::optional<InputPolicy> init;  ///< tried first when set
};

/**
 * Supremum of rate() over input policies by multistart projected-gradient
 * ascent with Armijo backtracking. Throws Error("no unichain policy found")
 * when no start yields a unichain aperiodic chain.
 */
BoundReport upper_bound(const UnifilarFsc& channel, const QGraph& g, const UpperBoundOptions& opts = {});
BoundReport upper_bound(const TransformedChannel& channel, const QGraph& g, const UpperBoundOptions& opts = {});

struct AscentResult {
  InputPolicy policy;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

/// One ascent run from `init` (entries on admissible inputs are clipped to be strictly positive).
AscentResult ascend(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& init, double tol, std::size_t max_iter);

struct BcjrSearchOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  double damping = 1.0;  ///< first step length tried along each Gauss-Newton direction
  std::size_t warm_start_iter = 2000;
};

struct BcjrSearchResult {
  InputPolicy policy;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/**
 * Looks for a BCJR-invariant policy on `g`, starting from `init` (uniform when
 * empty). Returns `init` untouched if it already meets the tolerance.
 * Throws NotConverged("did not converge ...") carrying the best residual.
 */
BcjrSearchResult find_bcjr_policy(const UnifilarFsc& channel, const QGraph& g, const std::optional<InputPolicy>& init = {},
                                  const BcjrSearchOptions& opts = {});

struct MonteCarloEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t steps = 0;
};

/// Simulates the (s,q,x,y) process and returns a plug-in estimate of I(X,S;Y|Q) with a 95% batch-means interval.
MonteCarloEstimate monte_carlo_rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, std::size_t steps,
                                    std::uint64_t seed);

}  // namespace fscap
