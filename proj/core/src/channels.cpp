#include "fscap/channels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "detail.hpp"
#include "fscap/error.hpp"

namespace fscap {

namespace {

constexpr double kRowTolerance = 1e-12;

UnifilarFsc blank(std::string name, std::size_t states, std::size_t inputs, std::size_t outputs) {
  UnifilarFsc c;
  c.name = std::move(name);
  c.state_count = states;
  c.input_count = inputs;
  c.output_count = outputs;
  c.kernel.assign(states * inputs * outputs, 0.0);
  c.next_state.assign(states * inputs * outputs, -1);
  c.admissible.resize(states);
  for (auto& a : c.admissible)
    for (std::size_t x = 0; x < inputs; ++x) a.push_back(static_cast<int>(x));
  return c;
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("channel parameter p must lie in [0,1]");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

bool UnifilarFsc::allows(std::size_t s, std::size_t x) const {
  const auto& a = admissible[s];
  return std::find(a.begin(), a.end(), static_cast<int>(x)) != a.end();
}

ValidationReport validate(const UnifilarFsc& c) {
  ValidationReport r;
  auto add = [&r](std::string msg, std::vector<long> idx) {
    r.violations.push_back({std::move(msg), std::move(idx)});
  };
  if (c.state_count == 0 || c.input_count == 0 || c.output_count == 0) {
    add("alphabet sizes must be positive", {});
    return r;
  }
  const std::size_t cells = c.state_count * c.input_count * c.output_count;
  if (c.kernel.size() != cells) add("kernel has " + std::to_string(c.kernel.size()) + " entries, expected " + std::to_string(cells), {});
  if (c.next_state.size() != cells)
    add("next_state has " + std::to_string(c.next_state.size()) + " entries, expected " + std::to_string(cells), {});
  if (c.admissible.size() != c.state_count)
    add("admissible has " + std::to_string(c.admissible.size()) + " entries, expected " + std::to_string(c.state_count), {});
  if (!r.ok()) return r;

  for (std::size_t s = 0; s < c.state_count; ++s) {
    if (c.admissible[s].empty()) add("state " + std::to_string(s) + " has empty action set", {long(s)});
    for (int x : c.admissible[s])
      if (x < 0 || static_cast<std::size_t>(x) >= c.input_count)
        add("state " + std::to_string(s) + " admits out-of-range input " + std::to_string(x), {long(s), long(x)});
  }
  for (std::size_t s = 0; s < c.state_count; ++s) {
    for (std::size_t x = 0; x < c.input_count; ++x) {
      const bool live = c.allows(s, x);
      double sum = 0.0;
      for (std::size_t y = 0; y < c.output_count; ++y) {
        const double p = c.prob(s, x, y);
        if (!(p >= 0.0 && p <= 1.0))
          add("entry (s=" + std::to_string(s) + ",x=" + std::to_string(x) + ",y=" + std::to_string(y) + ") = " + format_double(p) +
                  " outside [0,1]",
              {long(s), long(x), long(y)});
        sum += p;
        if (live && p > 0.0) {
          const int n = c.next(s, x, y);
          if (n < 0 || static_cast<std::size_t>(n) >= c.state_count)
            add("next_state undefined at (s=" + std::to_string(s) + ",x=" + std::to_string(x) + ",y=" + std::to_string(y) + ")",
                {long(s), long(x), long(y)});
        }
      }
      if (live && std::abs(sum - 1.0) > kRowTolerance)
        add("row (s=" + std::to_string(s) + ",x=" + std::to_string(x) + ") sums to " + format_double(sum), {long(s), long(x)});
    }
  }
  if (!c.labels.states.empty() && c.labels.states.size() != c.state_count) add("state label count mismatch", {});
  if (!c.labels.inputs.empty() && c.labels.inputs.size() != c.input_count) add("input label count mismatch", {});
  if (!c.labels.outputs.empty() && c.labels.outputs.size() != c.output_count) add("output label count mismatch", {});
  return r;
}

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.message;
  }
  return s;
}

void require_valid(const UnifilarFsc& channel) {
  const auto report = validate(channel);
  if (!report.ok()) throw InvalidArgument("invalid channel '" + channel.name + "': " + report.summary());
}

UnifilarFsc make_trapdoor() {
  UnifilarFsc c = blank("trapdoor", 2, 2, 2);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) {
        double p = 0.0;
        if (x == s) p = (y == x) ? 1.0 : 0.0;
        else p = 0.5;
        c.kernel[c.index(s, x, y)] = p;
        c.next_state[c.index(s, x, y)] = static_cast<int>(x ^ y ^ s);
      }
  c.labels = {{"0", "1"}, {"0", "1"}, {"0", "1"}};
  return c;
}

UnifilarFsc make_bsc_rll(ChannelParams params) {
  check_probability(params.p);
  UnifilarFsc c = blank("bsc-rll:p=" + format_double(params.p), 2, 2, 2);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) {
        c.kernel[c.index(s, x, y)] = (y == x) ? 1.0 - params.p : params.p;
        c.next_state[c.index(s, x, y)] = static_cast<int>(x);
      }
  c.admissible[1] = {0};
  c.labels = {{"0", "1"}, {"0", "1"}, {"0", "1"}};
  return c;
}

UnifilarFsc make_dec(ChannelParams params) {
  check_probability(params.p);
  UnifilarFsc c = blank("dec:p=" + format_double(params.p), 2, 2, 4);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t x = 0; x < 2; ++x) {
      const std::size_t diff = static_cast<std::size_t>(static_cast<int>(x) - static_cast<int>(s) + 1);
      c.kernel[c.index(s, x, diff)] += 1.0 - params.p;
      c.kernel[c.index(s, x, kDecErasure)] += params.p;
      for (std::size_t y = 0; y < 4; ++y) c.next_state[c.index(s, x, y)] = static_cast<int>(x);
    }
  c.labels = {{"0", "1"}, {"0", "1"}, {"-1", "0", "1", "?"}};
  return c;
}

bool is_strongly_connected(const UnifilarFsc& c) {
  detail::Adjacency adj(c.state_count);
  for (std::size_t s = 0; s < c.state_count; ++s)
    for (int x : c.admissible[s])
      for (std::size_t y = 0; y < c.output_count; ++y)
        if (c.prob(s, x, y) > 0.0) adj[s].push_back(c.next(s, x, y));
  int count = 0;
  detail::strongly_connected_components(adj, count);
  return count == 1;
}

UnifilarFsc channel_from_name(const std::string& name) {
  if (name == "trapdoor") return make_trapdoor();
  auto parse_p = [&](std::string_view prefix) {
    const std::string_view rest = std::string_view(name).substr(prefix.size());
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), p);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) throw InvalidArgument("bad channel parameter in '" + name + "'");
    return ChannelParams{p};
  };
  if (name.rfind("bsc-rll:p=", 0) == 0) return make_bsc_rll(parse_p("bsc-rll:p="));
  if (name.rfind("dec:p=", 0) == 0) return make_dec(parse_p("dec:p="));
  throw InvalidArgument("unknown channel '" + name + "'");
}

}  // namespace fscap
