#include "fscap/delay.hpp"

#include <algorithm>
#include <string>

#include "fscap/error.hpp"

namespace fscap {

namespace {

// Base states that can be current after sending `history` from `s`, or empty
// when some history symbol is not admissible at every possible state.
std::vector<int> possible_states(const UnifilarFsc& c, int s, const std::vector<int>& history) {
  std::vector<int> current{s};
  for (int x : history) {
    std::vector<int> next;
    for (int u : current) {
      if (!c.allows(u, x)) return {};
      for (std::size_t y = 0; y < c.output_count; ++y)
        if (c.prob(u, x, y) > 0.0) next.push_back(c.next(u, x, y));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
  }
  return current;
}

std::string history_label(const UnifilarFsc& c, const DecodedState& d) {
  auto name = [](const std::vector<std::string>& labels, int i) {
    return labels.empty() ? std::to_string(i) : labels[i];
  };
  std::string out = "(" + name(c.labels.states, d.base_state);
  for (int x : d.history) out += "," + name(c.labels.inputs, x);
  return out + ")";
}

}  // namespace

TransformedChannel transform(const UnifilarFsc& base, int delay) {
  if (delay < 1) throw InvalidArgument("delay must be at least 1, got " + std::to_string(delay));
  require_valid(base);

  TransformedChannel tc;
  tc.base = base;
  tc.delay = delay;
  if (delay == 1) {
    tc.channel = base;
    for (std::size_t s = 0; s < base.state_count; ++s) {
      tc.states.push_back({static_cast<int>(s), {}});
      tc.raw_codes.push_back(static_cast<long>(s));
    }
    return tc;
  }

  const std::size_t X = base.input_count;
  const std::size_t h = static_cast<std::size_t>(delay - 1);
  long per_state = 1;
  for (std::size_t i = 0; i < h; ++i) per_state *= static_cast<long>(X);
  const long total = per_state * static_cast<long>(base.state_count);

  std::vector<int> index_of(static_cast<std::size_t>(total), -1);
  std::vector<std::vector<int>> admissible;
  for (long code = 0; code < total; ++code) {
    DecodedState d;
    d.base_state = static_cast<int>(code / per_state);
    d.history.assign(h, 0);
    long rest = code % per_state;
    for (std::size_t i = h; i-- > 0;) {
      d.history[i] = static_cast<int>(rest % static_cast<long>(X));
      rest /= static_cast<long>(X);
    }
    const auto now = possible_states(base, d.base_state, d.history);
    if (now.empty()) continue;
    std::vector<int> allowed;
    for (std::size_t x = 0; x < X; ++x)
      if (std::all_of(now.begin(), now.end(), [&](int u) { return base.allows(u, x); })) allowed.push_back(static_cast<int>(x));
    if (allowed.empty())
      throw InvalidArgument("delay transform leaves extended state " + history_label(base, d) + " with no admissible input");
    index_of[static_cast<std::size_t>(code)] = static_cast<int>(tc.states.size());
    tc.states.push_back(std::move(d));
    tc.raw_codes.push_back(code);
    admissible.push_back(std::move(allowed));
  }

  UnifilarFsc& c = tc.channel;
  c.name = base.name + ":delay=" + std::to_string(delay);
  c.state_count = tc.states.size();
  c.input_count = X;
  c.output_count = base.output_count;
  c.kernel.assign(c.state_count * X * c.output_count, 0.0);
  c.next_state.assign(c.kernel.size(), -1);
  c.admissible = std::move(admissible);
  c.labels.inputs = base.labels.inputs;
  c.labels.outputs = base.labels.outputs;

  for (std::size_t i = 0; i < c.state_count; ++i) {
    const auto& d = tc.states[i];
    const int first = d.history.front();
    for (std::size_t x = 0; x < X; ++x) {
      for (std::size_t y = 0; y < c.output_count; ++y) {
        const double p = base.prob(d.base_state, first, y);
        c.kernel[c.index(i, x, y)] = p;
        if (p <= 0.0 || !c.allows(i, x)) continue;
        const long next_base = base.next(d.base_state, first, y);
        long code = next_base;
        for (std::size_t k = 1; k < h; ++k) code = code * static_cast<long>(X) + d.history[k];
        code = code * static_cast<long>(X) + static_cast<long>(x);
        c.next_state[c.index(i, x, y)] = index_of[static_cast<std::size_t>(code)];
      }
    }
    c.labels.states.push_back(history_label(base, d));
  }
  require_valid(c);
  return tc;
}

DecodedState decode_state(const TransformedChannel& tc, std::size_t index) {
  if (index >= tc.states.size())
    throw InvalidArgument("extended state " + std::to_string(index) + " out of range (have " + std::to_string(tc.states.size()) + ")");
  return tc.states[index];
}

int encode_state(const TransformedChannel& tc, const DecodedState& state) {
  const auto it = std::find(tc.states.begin(), tc.states.end(), state);
  return it == tc.states.end() ? -1 : static_cast<int>(it - tc.states.begin());
}

}  // namespace fscap
