#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fscap/channels.hpp"
#include "fscap/delay.hpp"
#include "fscap/qgraph.hpp"

namespace fscap {

/// Test distribution T(y|q) on a Q-graph, q-major.
struct GraphTestDistribution {
  std::size_t node_count = 0;
  std::size_t output_count = 0;
  std::vector<double> prob;

  double at(std::size_t q, std::size_t y) const { return prob[q * output_count + y]; }
  std::span<const double> row(std::size_t q) const { return {prob.data() + q * output_count, output_count}; }
};

/// Checked constructor: entries in [0,1], rows summing to 1 within 1e-12.
GraphTestDistribution make_test_distribution(std::size_t node_count, std::size_t output_count, std::vector<double> prob);

/// A KL reward in bits, or the marker for D(P||T) = +inf.
struct Reward {
  double bits = 0.0;
  bool infinite = false;

  static Reward infinity() { return {0.0, true}; }
};

/// D(P(.|x,s) || T(.|q)) in bits.
Reward kl_reward(const UnifilarFsc& channel, const GraphTestDistribution& t, std::size_t s, std::size_t x, std::size_t q);

/// Rewards and transitions of the dual MDP over z = s*|Q| + q.
struct MdpSpec {
  std::size_t state_count = 0;  ///< |S||Q|
  std::size_t input_count = 0;
  std::vector<std::vector<int>> actions;              ///< admissible inputs per z
  std::vector<Reward> reward;                         ///< index z*|X| + x
  std::vector<std::vector<std::pair<int, double>>> successors;  ///< index z*|X| + x: (z', prob)
};

MdpSpec build_mdp(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t);

/**
 * Largest set of pairs closed under every admissible action on which all
 * rewards are finite (sorted). Pairs outside it reach an infinite reward under
 * some action sequence.
 */
std::vector<int> finite_support(const MdpSpec& mdp);

/// rho, h on the support, and an action per supported pair. Entries outside the support are NaN / -1.
struct BellmanCertificate {
  double rho = 0.0;
  std::vector<double> h;
  std::vector<int> policy;
  std::vector<int> support;
};

struct RviResult {
  BellmanCertificate certificate;
  std::vector<std::vector<int>> classes;  ///< closed classes of the finite support, one rho each
  std::vector<double> class_rho;
  std::size_t iterations = 0;
  bool converged = false;
  double span = 0.0;  ///< final span(T h - h) of the reported class
};

/**
 * Relative value iteration (aperiodicity transform with weight 1/2) on every
 * closed class of the finite support. The reported certificate belongs to the
 * class with the smallest gain; h is zero at that class's first pair.
 * Throws Error("unreachable infinite reward") when the finite support is
 * empty and NotConverged when max_iter is exhausted. h0, when given, seeds
 * the iteration.
 */
RviResult relative_value_iteration(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t,
                                   double tol = 1e-10, std::size_t max_iter = 1000000, std::span<const double> h0 = {});

struct StateCheck {
  int pair = 0;
  double lhs = 0.0;  ///< rho + h(z)
  double rhs = 0.0;  ///< max over usable actions
  double violation = 0.0;
  std::vector<int> argmax;
  bool policy_attains = true;
};

struct VerificationReport {
  bool passed = false;
  double max_violation = 0.0;
  int worst_pair = -1;
  bool policy_optimal = true;
  std::vector<StateCheck> states;
  std::vector<int> excluded_pairs;           ///< pairs outside the support
  std::vector<std::string> excluded_actions;  ///< actions skipped because of infinite reward or leaving the support
};

/**
 * Checks rho + h(z) = max_x [D(P(.|x,s)||T(.|q)) + sum_y P(y|x,s) h(z')] on
 * every supported pair. Throws Error("support not closed ...") when the
 * certificate's action at a pair leaves the support, and
 * Error("infinite reward inside support ...") when it has infinite reward.
 */
VerificationReport verify_certificate(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t,
                                      const BellmanCertificate& cert, double tol = 1e-9);

/// First maximizing action at every supported pair, for a given h.
std::vector<int> greedy_policy(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t,
                               const std::vector<double>& h, const std::vector<int>& support);

/// Everything needed to check one closed-form result.
struct CertificateBundle {
  TransformedChannel channel;
  QGraph graph;
  GraphTestDistribution test;
  BellmanCertificate certificate;
};

/// Trapdoor with delay 2, 2-node graph, T(0|q) = [2/3, 1/3], rho = log2(3/2).
CertificateBundle trapdoor_certificate();

/// Encoder pairing with trapdoor_certificate(): the delay-2 trapdoor, the 4-node graph and its BCJR-invariant policy.
struct GraphEncoder {
  TransformedChannel channel;
  QGraph graph;
  InputPolicy policy;
};
GraphEncoder trapdoor_encoder();

/// Gain of the BSC-RLL delay-2 certificate with T(0|q) = [a,b,c,d] on the 4-node graph.
double bsc_rho(double p, double a, double b, double c, double d);

/// log2 of the two constraint ratios; a point is feasible when both are >= 0.
struct BscConstraints {
  double first = 0.0;
  double second = 0.0;
  bool ok() const { return first >= 0.0 && second >= 0.0; }
};
BscConstraints bsc_constraints(double p, double a, double b, double c, double d);

/// Throws InvalidArgument naming the violated inequality.
CertificateBundle bsc_certificate(double p, double a, double b, double c, double d);

struct BscBound {
  double value = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// Minimum of bsc_rho over the feasible set. Throws Error("no feasible point found").
BscBound bsc_bound(double p);

/// Which square root the DEC gain uses: sqrt(1+4a^2) (verified) or sqrt(1+4a^3) (as printed in the theorem).
enum class DecVariant { square, cube };

double dec_gamma1(double a);
double dec_gamma2(double a);
double dec_rho(double a, DecVariant variant = DecVariant::square);

/// DEC p = 1/2, delay 2, 8-node graph. Support is the finite support of the dual MDP.
CertificateBundle dec_certificate(double a, DecVariant variant = DecVariant::square);

struct DecBound {
  double value = 0.0;
  double a = 0.0;
};

/// Minimum of dec_rho over a in [1e-6, 1/2 - 1e-6].
DecBound dec_bound(DecVariant variant = DecVariant::square);

struct DecFeedback {
  double value = 0.0;
  double epsilon = 0.0;
};

/// max over eps in [0,1] of (1-p)(eps + p H2(eps)) / (p + (1-p) eps).
DecFeedback dec_feedback_capacity(double p);

/// Bellman check of both DEC variants at the same a.
struct DecDiscrepancy {
  double a = 0.0;
  double square_rho = 0.0, cube_rho = 0.0;
  double square_violation = 0.0, cube_violation = 0.0;
  std::string verdict;
};
DecDiscrepancy dec_discrepancy(double a, double tol = 1e-8);

}  // namespace fscap
