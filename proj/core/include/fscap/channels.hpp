#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fscap {

/// Optional display names for the three alphabets of a channel.
struct ChannelLabels {
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  friend bool operator==(const ChannelLabels&, const ChannelLabels&) = default;
};

/**
 * A unifilar finite-state channel: output law P(y|x,s) and a deterministic
 * next-state map s+ = f(s,x,y).
 *
 * Tables are stored flat in (s, x, y) order. Input constraints are expressed
 * through per-state admissible input sets; `next_state` may hold -1 wherever
 * the transition can never occur (zero probability or inadmissible input).
 *
 * The type is a plain value and may hold an inconsistent channel; use
 * validate() to inspect it and require_valid() to reject it.
 */
struct UnifilarFsc {
  std::string name;
  std::size_t state_count = 0;
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  std::vector<double> kernel;
  std::vector<int> next_state;
  std::vector<std::vector<int>> admissible;
  ChannelLabels labels;

  std::size_t index(std::size_t s, std::size_t x, std::size_t y) const {
    return (s * input_count + x) * output_count + y;
  }
  double prob(std::size_t s, std::size_t x, std::size_t y) const { return kernel[index(s, x, y)]; }
  int next(std::size_t s, std::size_t x, std::size_t y) const { return next_state[index(s, x, y)]; }
  /// Output distribution P(.|x,s).
  std::span<const double> row(std::size_t s, std::size_t x) const {
    return {kernel.data() + index(s, x, 0), output_count};
  }
  bool allows(std::size_t s, std::size_t x) const;

  friend bool operator==(const UnifilarFsc&, const UnifilarFsc&) = default;
};

/// Crossover or erasure probability of a built-in channel.
struct ChannelParams {
  double p = 0.0;
};

struct Violation {
  std::string message;
  std::vector<long> indices;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks every structural invariant of a channel. Never throws.
ValidationReport validate(const UnifilarFsc& channel);

/// Throws InvalidArgument carrying the validation summary when invalid.
void require_valid(const UnifilarFsc& channel);

/// Blackwell's trapdoor channel: y is s or x with equal probability, s+ = x ^ y ^ s.
UnifilarFsc make_trapdoor();

/// BSC(p) whose inputs obey the (1,inf)-RLL constraint; the state is the previous input.
UnifilarFsc make_bsc_rll(ChannelParams params);

/// Dicode erasure channel. Output alphabet is ordered [-1, 0, 1, ?].
UnifilarFsc make_dec(ChannelParams params);

/// Output index of the erasure symbol in make_dec() channels.
inline constexpr std::size_t kDecErasure = 3;

/// True when every state can reach every other state through positive-probability admissible moves.
bool is_strongly_connected(const UnifilarFsc& channel);

/**
 * Resolves a built-in channel name: "trapdoor", "bsc-rll:p=<float>",
 * "dec:p=<float>". Throws InvalidArgument on anything else.
 */
UnifilarFsc channel_from_name(const std::string& name);

}  // namespace fscap
