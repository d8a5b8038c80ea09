#pragma once

// Shared internals of the rate, ascent and BCJR code.

#include <vector>

#include "fscap/graph_bounds.hpp"

namespace fscap::detail {

/// Stationary evaluation plus the relative values and Q-values of the policy
/// viewed as an average-reward process with reward D(W(.|x,s) || P(.|q)).
struct RateModel {
  RateEvaluation eval;
  std::vector<double> divergence;  ///< G(z,x), index z*|X| + x
  std::vector<double> relative;    ///< h(z), normalized so that pi.h = 0
  std::vector<double> q_value;     ///< G(z,x) + sum_y W(y|x,s) h(next), index z*|X| + x
};

RateEvaluation evaluate_only(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, const SqChain& chain);

RateModel analyze(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy);

/// Mask of admissible inputs, same layout as InputPolicy::prob.
std::vector<char> admissible_mask(const UnifilarFsc& channel, const QGraph& g);

/// Raises admissible entries to at least `floor` and renormalizes each row.
void clip_policy(InputPolicy& policy, const std::vector<char>& mask, double floor);

}  // namespace fscap::detail
