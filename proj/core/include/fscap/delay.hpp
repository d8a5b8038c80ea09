#pragma once

#include <cstddef>
#include <vector>

#include "fscap/channels.hpp"

namespace fscap {

/// Base-channel view of an extended state: the state d steps back and the d-1 inputs sent since.
struct DecodedState {
  int base_state = 0;
  std::vector<int> history;  ///< oldest first

  friend bool operator==(const DecodedState&, const DecodedState&) = default;
};

/**
 * Instantaneous-feedback channel equivalent to `base` with feedback delayed by
 * `delay` uses.
 *
 * Extended states are (s_{t-d}, x_{t-d+1}, ..., x_{t-1}); the output is the
 * base output for the oldest buffered input, so it depends on the extended
 * state only. Raw codes are mixed radix with the base state most significant
 * and the oldest history symbol next; histories that break the base input
 * constraint are pruned and the survivors keep increasing-code order.
 */
struct TransformedChannel {
  UnifilarFsc base;
  int delay = 1;
  UnifilarFsc channel;
  std::vector<DecodedState> states;  ///< decode table, indexed by extended state
  std::vector<long> raw_codes;       ///< mixed-radix code of each surviving state
};

/// Builds the delay transform. Throws InvalidArgument for delay < 1 or an invalid base.
TransformedChannel transform(const UnifilarFsc& base, int delay);

/// Inverse of the state encoding. Throws InvalidArgument on an out-of-range index.
DecodedState decode_state(const TransformedChannel& tc, std::size_t index);

/// Index of (s, history) in the transformed channel, or -1 when that history was pruned.
int encode_state(const TransformedChannel& tc, const DecodedState& state);

}  // namespace fscap
