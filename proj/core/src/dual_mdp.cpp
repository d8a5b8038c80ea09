#include "fscap/dual_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail.hpp"
#include "fscap/error.hpp"

namespace fscap {

namespace {

constexpr double kTransform = 0.5;  // P -> tP + (1-t)I keeps the gain and makes every class aperiodic

std::string pair_name(const UnifilarFsc& c, const QGraph& g, int z) {
  const std::size_t s = static_cast<std::size_t>(z) / g.node_count, q = static_cast<std::size_t>(z) % g.node_count;
  const std::string state = c.labels.states.empty() ? std::to_string(s) : c.labels.states[s];
  return "(" + state + ",q=" + std::to_string(q) + ")";
}

void require_compatible(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t) {
  require_valid(channel);
  if (g.output_count != channel.output_count) throw InvalidArgument("Q-graph and channel output alphabets differ");
  if (t.node_count != g.node_count || t.output_count != g.output_count)
    throw InvalidArgument("test distribution shape does not match the Q-graph");
}

}  // namespace

GraphTestDistribution make_test_distribution(std::size_t node_count, std::size_t output_count, std::vector<double> prob) {
  if (prob.size() != node_count * output_count)
    throw InvalidArgument("test distribution has " + std::to_string(prob.size()) + " entries, expected " +
                          std::to_string(node_count * output_count));
  for (std::size_t q = 0; q < node_count; ++q) {
    double sum = 0.0;
    for (std::size_t y = 0; y < output_count; ++y) {
      const double v = prob[q * output_count + y];
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("test distribution entry (q=" + std::to_string(q) + ") outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("test distribution row q=" + std::to_string(q) + " does not sum to 1");
  }
  return {node_count, output_count, std::move(prob)};
}

Reward kl_reward(const UnifilarFsc& channel, const GraphTestDistribution& t, std::size_t s, std::size_t x, std::size_t q) {
  double bits = 0.0;
  for (std::size_t y = 0; y < channel.output_count; ++y) {
    const double p = channel.prob(s, x, y);
    if (p <= 0.0) continue;
    const double r = t.at(q, y);
    if (r <= 0.0) return Reward::infinity();
    bits += p * std::log2(p / r);
  }
  return {std::max(bits, 0.0), false};
}

MdpSpec build_mdp(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t) {
  require_compatible(channel, g, t);
  const std::size_t Q = g.node_count, X = channel.input_count;
  MdpSpec m;
  m.state_count = channel.state_count * Q;
  m.input_count = X;
  m.actions.resize(m.state_count);
  m.reward.assign(m.state_count * X, Reward::infinity());
  m.successors.resize(m.state_count * X);
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t z = s * Q + q;
      m.actions[z] = channel.admissible[s];
      for (int x : channel.admissible[s]) {
        m.reward[z * X + x] = kl_reward(channel, t, s, x, q);
        for (std::size_t y = 0; y < channel.output_count; ++y) {
          const double w = channel.prob(s, x, y);
          if (w > 0.0) m.successors[z * X + x].emplace_back(static_cast<int>(channel.next(s, x, y) * Q + g.next(q, y)), w);
        }
      }
    }
  return m;
}

std::vector<int> finite_support(const MdpSpec& m) {
  const std::size_t X = m.input_count;
  std::vector<char> bad(m.state_count, 0);
  for (std::size_t z = 0; z < m.state_count; ++z)
    for (int x : m.actions[z])
      if (m.reward[z * X + x].infinite) bad[z] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t z = 0; z < m.state_count; ++z) {
      if (bad[z]) continue;
      for (int x : m.actions[z])
        for (const auto& [next, w] : m.successors[z * X + x])
          if (bad[next]) bad[z] = 1;
      changed |= static_cast<bool>(bad[z]);
    }
  }
  std::vector<int> out;
  for (std::size_t z = 0; z < m.state_count; ++z)
    if (!bad[z]) out.push_back(static_cast<int>(z));
  return out;
}

std::vector<int> greedy_policy(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t,
                               const std::vector<double>& h, const std::vector<int>& support) {
  const auto m = build_mdp(channel, g, t);
  const std::size_t X = m.input_count;
  std::vector<char> inside(m.state_count, 0);
  for (int z : support) inside[z] = 1;
  std::vector<int> policy(m.state_count, -1);
  for (int z : support) {
    double best = -std::numeric_limits<double>::infinity();
    for (int x : m.actions[z]) {
      const auto& r = m.reward[z * X + x];
      if (r.infinite) continue;
      double v = r.bits;
      bool ok = true;
      for (const auto& [next, w] : m.successors[z * X + x]) {
        if (!inside[next]) ok = false;
        else v += w * h[next];
      }
      if (ok && v > best + 1e-12) {
        best = v;
        policy[z] = x;
      }
    }
  }
  return policy;
}

RviResult relative_value_iteration(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t, double tol,
                                   std::size_t max_iter, std::span<const double> h0) {
  const auto m = build_mdp(channel, g, t);
  const std::size_t X = m.input_count, n = m.state_count;
  if (!h0.empty() && h0.size() != n) throw InvalidArgument("initial h has the wrong size");
  const auto support = finite_support(m);
  if (support.empty()) throw Error("unreachable infinite reward: every pair reaches an infinite reward");

  std::vector<char> inside(n, 0);
  for (int z : support) inside[z] = 1;
  detail::Adjacency adj(n);
  for (int z : support)
    for (int x : m.actions[z])
      for (const auto& [next, w] : m.successors[z * X + x]) adj[z].push_back(next);
  RviResult res;
  for (auto& cls : detail::closed_classes(adj))
    if (inside[cls.front()]) res.classes.push_back(std::move(cls));

  std::vector<std::vector<double>> class_h;
  std::vector<std::size_t> class_iter;
  std::vector<double> class_span;
  std::vector<bool> class_converged;
  for (const auto& cls : res.classes) {
    std::vector<double> w(n, 0.0), tw(n, 0.0);
    if (!h0.empty())
      for (int z : cls) w[z] = h0[z] / kTransform;
    const int ref = cls.front();
    double lo = 0.0, hi = 0.0;
    std::size_t it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (int z : cls) {
        double best = -std::numeric_limits<double>::infinity();
        for (int x : m.actions[z]) {
          double v = m.reward[z * X + x].bits;
          for (const auto& [next, p] : m.successors[z * X + x]) v += kTransform * p * w[next];
          best = std::max(best, v);
        }
        tw[z] = best + (1.0 - kTransform) * w[z];
        lo = std::min(lo, tw[z] - w[z]);
        hi = std::max(hi, tw[z] - w[z]);
      }
      const double shift = tw[ref];
      for (int z : cls) w[z] = tw[z] - shift;
      if (hi - lo <= tol) {
        converged = true;
        ++it;
        break;
      }
    }
    res.class_rho.push_back(0.5 * (lo + hi));
    std::vector<double> h(n, std::numeric_limits<double>::quiet_NaN());
    for (int z : cls) h[z] = kTransform * w[z];
    class_h.push_back(std::move(h));
    class_iter.push_back(it);
    class_span.push_back(hi - lo);
    class_converged.push_back(converged);
  }

  const std::size_t best = static_cast<std::size_t>(std::min_element(res.class_rho.begin(), res.class_rho.end()) - res.class_rho.begin());
  res.iterations = class_iter[best];
  res.converged = class_converged[best];
  res.span = class_span[best];
  if (!res.converged) throw NotConverged("relative value iteration did not converge", res.span);
  auto& cert = res.certificate;
  cert.rho = res.class_rho[best];
  cert.h = class_h[best];
  cert.support = res.classes[best];
  cert.policy = greedy_policy(channel, g, t, cert.h, cert.support);
  return res;
}

VerificationReport verify_certificate(const UnifilarFsc& channel, const QGraph& g, const GraphTestDistribution& t,
                                      const BellmanCertificate& cert, double tol) {
  const auto m = build_mdp(channel, g, t);
  const std::size_t X = m.input_count, n = m.state_count;
  if (cert.h.size() != n) throw InvalidArgument("certificate h has " + std::to_string(cert.h.size()) + " entries, expected " + std::to_string(n));
  if (!cert.policy.empty() && cert.policy.size() != n) throw InvalidArgument("certificate policy has the wrong size");
  std::vector<char> inside(n, 0);
  for (int z : cert.support) {
    if (z < 0 || static_cast<std::size_t>(z) >= n) throw InvalidArgument("certificate support names a pair out of range");
    if (!std::isfinite(cert.h[z])) throw InvalidArgument("certificate h is not finite at " + pair_name(channel, g, z));
    inside[z] = 1;
  }

  VerificationReport rep;
  for (std::size_t z = 0; z < n; ++z)
    if (!inside[z]) rep.excluded_pairs.push_back(static_cast<int>(z));

  for (int z : cert.support) {
    StateCheck sc;
    sc.pair = z;
    sc.lhs = cert.rho + cert.h[z];
    std::vector<std::pair<int, double>> values;
    for (int x : m.actions[z]) {
      const auto& r = m.reward[z * X + x];
      std::string why;
      double v = r.bits;
      if (r.infinite) why = "infinite reward";
      for (const auto& [next, w] : m.successors[z * X + x]) {
        if (!inside[next]) {
          if (why.empty()) why = "leaves support to " + pair_name(channel, g, next);
        } else {
          v += w * cert.h[next];
        }
      }
      if (!why.empty()) {
        rep.excluded_actions.push_back(pair_name(channel, g, z) + " x=" + std::to_string(x) + ": " + why);
        continue;
      }
      values.emplace_back(x, v);
    }
    const int chosen = cert.policy.empty() ? -1 : cert.policy[z];
    if (chosen >= 0 && std::none_of(values.begin(), values.end(), [&](const auto& e) { return e.first == chosen; })) {
      const auto& r = m.reward[z * X + chosen];
      if (r.infinite) throw Error("infinite reward inside support at " + pair_name(channel, g, z) + " x=" + std::to_string(chosen));
      throw Error("support not closed: " + pair_name(channel, g, z) + " x=" + std::to_string(chosen) + " leaves the support");
    }
    if (values.empty()) throw Error("support not closed: no usable action at " + pair_name(channel, g, z));
    sc.rhs = -std::numeric_limits<double>::infinity();
    for (const auto& e : values) sc.rhs = std::max(sc.rhs, e.second);
    for (const auto& e : values)
      if (e.second >= sc.rhs - tol) sc.argmax.push_back(e.first);
    if (chosen >= 0)
      sc.policy_attains = std::find(sc.argmax.begin(), sc.argmax.end(), chosen) != sc.argmax.end();
    sc.violation = std::abs(sc.rhs - sc.lhs);
    if (sc.violation > rep.max_violation || rep.worst_pair < 0) {
      rep.max_violation = std::max(rep.max_violation, sc.violation);
      if (sc.violation >= rep.max_violation) rep.worst_pair = z;
    }
    rep.policy_optimal = rep.policy_optimal && sc.policy_attains;
    rep.states.push_back(std::move(sc));
  }
  rep.passed = !cert.support.empty() && rep.max_violation <= tol;
  return rep;
}

}  // namespace fscap
