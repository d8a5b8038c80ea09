#include "fscap/graph_bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "detail.hpp"
#include "fscap/error.hpp"
#include "rate_detail.hpp"

namespace fscap {

namespace detail {

namespace {

// Stand-in for log2(W/m) when m = 0 < W; such terms only arise at pairs the
// policy never visits, so a large finite value keeps the gradient defined.
constexpr double kLogRatioCap = 1e3;

double divergence_to(std::span<const double> w, const double* m) {
  double d = 0.0;
  for (std::size_t y = 0; y < w.size(); ++y) {
    if (w[y] <= 0.0) continue;
    d += w[y] * (m[y] > 0.0 ? std::log2(w[y] / m[y]) : kLogRatioCap);
  }
  return d;
}

}  // namespace

std::vector<char> admissible_mask(const UnifilarFsc& channel, const QGraph& g) {
  std::vector<char> mask(channel.state_count * g.node_count * channel.input_count, 0);
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < g.node_count; ++q)
      for (int x : channel.admissible[s]) mask[(s * g.node_count + q) * channel.input_count + x] = 1;
  return mask;
}

void clip_policy(InputPolicy& policy, const std::vector<char>& mask, double floor) {
  const std::size_t X = policy.input_count;
  for (std::size_t z = 0; z < policy.state_count * policy.node_count; ++z) {
    double sum = 0.0;
    for (std::size_t x = 0; x < X; ++x) {
      double& p = policy.prob[z * X + x];
      p = mask[z * X + x] ? std::max(p, floor) : 0.0;
      sum += p;
    }
    for (std::size_t x = 0; x < X; ++x) policy.prob[z * X + x] /= sum;
  }
}

RateEvaluation evaluate_only(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, const SqChain& chain) {
  RateEvaluation ev;
  ev.pi = stationary(chain);
  ev.stationarity_residual = stationary_residual(chain, ev.pi);
  const std::size_t Q = g.node_count, Y = channel.output_count;
  ev.node_marginal.assign(Q, 0.0);
  ev.output_given_node.assign(Q * Y, 0.0);
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      const double w = ev.pi[s * Q + q];
      if (w <= 0.0) continue;
      ev.node_marginal[q] += w;
      for (int x : channel.admissible[s]) {
        const double px = policy.at(s, q, x);
        if (px <= 0.0) continue;
        const auto row = channel.row(s, x);
        for (std::size_t y = 0; y < Y; ++y) ev.output_given_node[q * Y + y] += w * px * row[y];
      }
    }
  for (std::size_t q = 0; q < Q; ++q) {
    double* m = ev.output_given_node.data() + q * Y;
    if (ev.node_marginal[q] > 0.0) {
      double total = 0.0;
      for (std::size_t y = 0; y < Y; ++y) total += m[y];
      for (std::size_t y = 0; y < Y; ++y) m[y] /= total;
    } else {
      std::fill(m, m + Y, 1.0 / static_cast<double>(Y));
    }
  }
  // I(X,S;Y|Q) = H(Y|Q) - H(Y|X,S,Q).
  double h_y = 0.0, h_cond = 0.0;
  for (std::size_t q = 0; q < Q; ++q)
    if (ev.node_marginal[q] > 0.0)
      h_y += ev.node_marginal[q] * entropy_bits({ev.output_given_node.data() + q * Y, Y});
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      const double w = ev.pi[s * Q + q];
      if (w <= 0.0) continue;
      for (int x : channel.admissible[s]) {
        const double px = policy.at(s, q, x);
        if (px > 0.0) h_cond += w * px * entropy_bits(channel.row(s, x));
      }
    }
  ev.rate = std::max(h_y - h_cond, 0.0);
  return ev;
}

RateModel analyze(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  const auto chain = build_sq_chain(channel, g, policy);
  RateModel model;
  model.eval = evaluate_only(channel, g, policy, chain);
  const std::size_t Q = g.node_count, X = channel.input_count, Y = channel.output_count, n = chain.size();
  const auto& pi = model.eval.pi;

  model.divergence.assign(n * X, 0.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t z = s * Q + q;
      const double* m = model.eval.output_given_node.data() + q * Y;
      for (int x : channel.admissible[s]) {
        const double d = divergence_to(channel.row(s, x), m);
        model.divergence[z * X + x] = d;
        if (pi[z] > 0.0) v(static_cast<Eigen::Index>(z)) += policy.at(s, q, x) * d;
      }
    }
  double rho = 0.0;
  for (std::size_t z = 0; z < n; ++z) rho += pi[z] * v(static_cast<Eigen::Index>(z));

  // Poisson equation (I - M + 1 pi^T) h = v - rho 1; the solution satisfies pi.h = 0.
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - chain.at(i, j) + pi[j];
  const Eigen::VectorXd h = a.partialPivLu().solve((v.array() - rho).matrix());
  model.relative.assign(h.data(), h.data() + n);

  model.q_value.assign(n * X, 0.0);
  for (std::size_t s = 0; s < channel.state_count; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t z = s * Q + q;
      for (int x : channel.admissible[s]) {
        double value = model.divergence[z * X + x];
        for (std::size_t y = 0; y < Y; ++y) {
          const double w = channel.prob(s, x, y);
          if (w > 0.0) value += w * h(static_cast<Eigen::Index>(channel.next(s, x, y) * Q + g.next(q, y)));
        }
        model.q_value[z * X + x] = value;
      }
    }
  return model;
}

}  // namespace detail

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::upper: return "upper";
    case BoundKind::lower: return "lower";
    case BoundKind::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

RateEvaluation evaluate_rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  return detail::evaluate_only(channel, g, policy, build_sq_chain(channel, g, policy));
}

double rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  return evaluate_rate(channel, g, policy).rate;
}

std::vector<double> rate_gradient(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  auto model = detail::analyze(channel, g, policy);
  const std::size_t X = channel.input_count;
  for (std::size_t z = 0; z < model.eval.pi.size(); ++z)
    for (std::size_t x = 0; x < X; ++x) model.q_value[z * X + x] *= model.eval.pi[z];
  return model.q_value;
}

namespace {

double projected_gradient_norm(const InputPolicy& p, const std::vector<double>& grad, const std::vector<char>& mask) {
  const std::size_t X = p.input_count;
  std::vector<double> row(X);
  double total = 0.0;
  for (std::size_t z = 0; z < p.state_count * p.node_count; ++z) {
    for (std::size_t x = 0; x < X; ++x) row[x] = p.prob[z * X + x] + grad[z * X + x];
    detail::project_to_simplex(row, {mask.data() + z * X, X});
    for (std::size_t x = 0; x < X; ++x) total += (row[x] - p.prob[z * X + x]) * (row[x] - p.prob[z * X + x]);
  }
  return std::sqrt(total);
}

constexpr double kPolicyFloor = 1e-12;
constexpr double kArmijo = 1e-4;
constexpr std::size_t kStagnationLimit = 500;
constexpr double kMaxShrink = 0.1;

}  // namespace

AscentResult ascend(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& init, double tol, std::size_t max_iter) {
  const auto mask = detail::admissible_mask(channel, g);
  const std::size_t X = channel.input_count, n = channel.state_count * g.node_count;
  AscentResult res;
  res.policy = init;
  detail::clip_policy(res.policy, mask, kPolicyFloor);
  auto model = detail::analyze(channel, g, res.policy);
  res.value = model.eval.rate;

  std::vector<double> grad(n * X), dir(n * X), row(X);
  InputPolicy trial = res.policy;
  auto step_to = [&](double t) {
    for (std::size_t z = 0; z < n; ++z) {
      for (std::size_t x = 0; x < X; ++x) row[x] = res.policy.prob[z * X + x] + t * dir[z * X + x];
      detail::project_to_simplex(row, {mask.data() + z * X, X});
      // Shorten the move so no probability shrinks by more than kMaxShrink in one step. Jumping
      // straight to the floor can strand the chain next to a reducible one, where the gradient
      // is dominated by states of probability ~1e-13 and stops being informative.
      double lambda = 1.0;
      for (std::size_t x = 0; x < X; ++x) {
        const double old = res.policy.prob[z * X + x], limit = old * kMaxShrink;
        if (row[x] < limit && old > kPolicyFloor) lambda = std::min(lambda, (old - limit) / (old - row[x]));
      }
      for (std::size_t x = 0; x < X; ++x) {
        const double old = res.policy.prob[z * X + x];
        trial.prob[z * X + x] = old + lambda * (row[x] - old);
      }
    }
    detail::clip_policy(trial, mask, kPolicyFloor);
  };
  double step = 1.0, best_norm = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    for (std::size_t z = 0; z < n; ++z)
      for (std::size_t x = 0; x < X; ++x) {
        grad[z * X + x] = model.eval.pi[z] * model.q_value[z * X + x];
        dir[z * X + x] = model.eval.pi[z] > 0.0 ? model.q_value[z * X + x] : 0.0;
      }
    const double norm = projected_gradient_norm(res.policy, grad, mask);
    if (norm <= tol) {
      res.converged = true;
      break;
    }
    if (norm < 0.99 * best_norm) {
      best_norm = norm;
      since_best = 0;
    } else if (++since_best >= kStagnationLimit) {
      res.diagnostic = "stagnated";
      break;
    }

    // Armijo backtracking on the rate itself.
    bool accepted = false;
    double t = step;
    for (int halvings = 0; halvings < 60 && !accepted; ++halvings, t *= 0.5) {
      step_to(t);
      double predicted = 0.0;
      for (std::size_t i = 0; i < n * X; ++i) predicted += grad[i] * (trial.prob[i] - res.policy.prob[i]);
      if (predicted <= 0.0) continue;
      const double value = rate(channel, g, trial);
      // Gains near rounding level carry no information; leave those to the slope test below.
      if (value >= res.value + kArmijo * predicted && value - res.value > 1e-14 * std::max(1.0, res.value)) {
        accepted = true;
        step = std::min(2.0 * t, 1e6);
      }
    }
    if (accepted) {
      std::swap(res.policy, trial);
      model = detail::analyze(channel, g, res.policy);
      res.value = model.eval.rate;
      continue;
    }

    // Close to the optimum the rate is flat to machine precision; the slope at the trial point
    // still resolves the ascent direction.
    t = step;
    for (int halvings = 0; halvings < 60 && !accepted; ++halvings, t *= 0.5) {
      step_to(t);
      double moved = 0.0;
      for (std::size_t i = 0; i < n * X; ++i) moved += std::abs(trial.prob[i] - res.policy.prob[i]);
      if (moved == 0.0) break;
      auto candidate = detail::analyze(channel, g, trial);
      double slope = 0.0;
      for (std::size_t z = 0; z < n; ++z)
        for (std::size_t x = 0; x < X; ++x)
          slope += candidate.eval.pi[z] * candidate.q_value[z * X + x] * (trial.prob[z * X + x] - res.policy.prob[z * X + x]);
      if (slope > 0.0 && candidate.eval.rate >= res.value - 1e-14 * std::max(1.0, res.value)) {
        accepted = true;
        step = std::min(2.0 * t, 1e6);
        std::swap(res.policy, trial);
        model = std::move(candidate);
        res.value = model.eval.rate;
      }
    }
    if (!accepted) {
      res.diagnostic = "line search found no ascent step";
      break;
    }
  }
  if (!res.converged) {
    if (res.diagnostic.empty()) res.diagnostic = "iteration limit reached";
    std::ostringstream msg;
    msg.precision(3);
    msg << res.diagnostic << " (projected gradient norm " << best_norm << ")";
    res.diagnostic = msg.str();
  }
  return res;
}

namespace {

InputPolicy dirichlet_policy(const UnifilarFsc& channel, const QGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit(1.0);
  InputPolicy p = uniform_policy(channel, g);
  const std::size_t X = p.input_count;
  for (std::size_t z = 0; z < p.state_count * p.node_count; ++z) {
    double sum = 0.0;
    for (std::size_t x = 0; x < X; ++x)
      if (p.prob[z * X + x] > 0.0) sum += (p.prob[z * X + x] = unit(rng));
    for (std::size_t x = 0; x < X; ++x) p.prob[z * X + x] /= sum;
  }
  return p;
}

std::uint64_t start_seed(std::uint64_t seed, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(k)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

}  // namespace

BoundReport upper_bound(const UnifilarFsc& channel, const QGraph& g, const UpperBoundOptions& opts) {
  require_valid(channel);
  if (g.output_count != channel.output_count) throw InvalidArgument("Q-graph and channel output alphabets differ");
  std::vector<InputPolicy> starts;
  if (opts.init) {
    require_valid_policy(channel, g, *opts.init);
    starts.push_back(*opts.init);
  }
  if (opts.uniform_start) starts.push_back(uniform_policy(channel, g));
  for (std::size_t k = 0; k < opts.random_starts; ++k) starts.push_back(dirichlet_policy(channel, g, start_seed(opts.seed, k)));
  if (starts.empty()) throw InvalidArgument("upper_bound needs at least one start");

  std::vector<std::optional<AscentResult>> results(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < starts.size();) {
      try {
        results[i] = ascend(channel, g, starts[i], opts.tol, opts.max_iter);
      } catch (const MultichainError&) {
      } catch (const PeriodicError&) {
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(starts.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& r : results)
    if (r) best_value = std::max(best_value, r->value);
  if (!std::isfinite(best_value)) throw Error("no unichain policy found");
  std::size_t best = 0;
  while (!results[best] || results[best]->value < best_value - 1e-12) ++best;
  const AscentResult& r = *results[best];

  BoundReport rep;
  rep.channel_id = channel.name;
  rep.qgraph_id = g.name;
  rep.kind = BoundKind::upper;
  rep.value = r.value;
  rep.policy = r.policy;
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  rep.multistart_count = starts.size();
  rep.diagnostic = r.diagnostic;
  const auto ev = evaluate_rate(channel, g, r.policy);
  rep.output_given_node = ev.output_given_node;
  rep.stationarity_residual = ev.stationarity_residual;
  rep.bcjr_residual = bcjr_residual(channel, g, r.policy);
  return rep;
}

BoundReport upper_bound(const TransformedChannel& channel, const QGraph& g, const UpperBoundOptions& opts) {
  auto rep = upper_bound(channel.channel, g, opts);
  rep.delay = channel.delay;
  rep.channel_id = channel.base.name;
  return rep;
}

BoundReport lower_bound(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, double tol) {
  require_valid(channel);
  const double residual = bcjr_residual(channel, g, policy);
  if (!(residual <= tol)) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "not BCJR-invariant (residual " << residual << ")";
    throw NotConverged(msg.str(), residual);
  }
  const auto ev = evaluate_rate(channel, g, policy);
  BoundReport rep;
  rep.channel_id = channel.name;
  rep.qgraph_id = g.name;
  rep.kind = BoundKind::lower;
  rep.value = ev.rate;
  rep.policy = policy;
  rep.bcjr_residual = residual;
  rep.stationarity_residual = ev.stationarity_residual;
  rep.converged = true;
  rep.output_given_node = ev.output_given_node;
  return rep;
}

BoundReport lower_bound(const TransformedChannel& channel, const QGraph& g, const InputPolicy& policy, double tol) {
  auto rep = lower_bound(channel.channel, g, policy, tol);
  rep.delay = channel.delay;
  rep.channel_id = channel.base.name;
  return rep;
}

}  // namespace fscap
