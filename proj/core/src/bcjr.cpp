#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fscap/error.hpp"
#include "fscap/graph_bounds.hpp"
#include "rate_detail.hpp"

namespace fscap {

namespace {

constexpr double kSnapBelow = 1e-9;
constexpr double kJacobianStep = 1e-7;

double residual_from(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, const std::vector<double>& pi) {
  const std::size_t S = channel.state_count, Q = g.node_count, Y = channel.output_count;
  std::vector<double> node(Q, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t q = 0; q < Q; ++q) node[q] += pi[s * Q + q];

  double worst = 0.0;
  std::vector<double> joint(S);
  for (std::size_t q = 0; q < Q; ++q) {
    if (node[q] <= 0.0) continue;
    for (std::size_t y = 0; y < Y; ++y) {
      std::fill(joint.begin(), joint.end(), 0.0);
      double total = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        const double w = pi[s * Q + q];
        if (w <= 0.0) continue;
        for (int x : channel.admissible[s]) {
          const double mass = w * policy.at(s, q, x) * channel.prob(s, x, y);
          if (mass <= 0.0) continue;
          joint[channel.next(s, x, y)] += mass;
          total += mass;
        }
      }
      if (total <= 0.0) continue;
      const std::size_t qn = g.next(q, y);
      for (std::size_t sn = 0; sn < S; ++sn)
        worst = std::max(worst, std::abs(pi[sn * Q + qn] / node[qn] - joint[sn] / total));
    }
  }
  return worst;
}

double safe_residual(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  try {
    return bcjr_residual(channel, g, policy);
  } catch (const MultichainError&) {
  } catch (const PeriodicError&) {
  }
  return std::numeric_limits<double>::infinity();
}

// Consistency equations in product form: P(q,y) pi(t|phi(q,y)) - P(t, q, y) for every node q,
// output y and next state t.
bool consistency(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, Eigen::VectorXd& out) {
  std::vector<double> pi;
  try {
    pi = stationary(build_sq_chain(channel, g, policy));
  } catch (const MultichainError&) {
    return false;
  } catch (const PeriodicError&) {
    return false;
  }
  const std::size_t S = channel.state_count, Q = g.node_count, Y = channel.output_count;
  std::vector<double> node(Q, 0.0);
  for (std::size_t z = 0; z < S * Q; ++z) node[z % Q] += pi[z];
  out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(Q * Y * S));
  for (std::size_t q = 0; q < Q; ++q)
    for (std::size_t y = 0; y < Y; ++y) {
      const std::size_t qn = g.next(q, y), base = (q * Y + y) * S;
      double total = 0.0;
      for (std::size_t s = 0; s < S; ++s)
        for (int x : channel.admissible[s]) {
          const double mass = pi[s * Q + q] * policy.at(s, q, x) * channel.prob(s, x, y);
          if (mass <= 0.0) continue;
          out(static_cast<Eigen::Index>(base + channel.next(s, x, y))) -= mass;
          total += mass;
        }
      if (node[qn] > 0.0)
        for (std::size_t t = 0; t < S; ++t) out(static_cast<Eigen::Index>(base + t)) += total * pi[t * Q + qn] / node[qn];
    }
  return true;
}

// Moves mass between one input and the largest entry of the same row; these directions span
// the tangent space of the policy simplices.
struct Direction {
  std::size_t entry, pivot;
};

std::vector<Direction> tangent_directions(const InputPolicy& policy, const std::vector<char>& mask) {
  const std::size_t X = policy.input_count;
  std::vector<Direction> out;
  for (std::size_t z = 0; z < policy.state_count * policy.node_count; ++z) {
    std::size_t pivot = X;
    for (std::size_t x = 0; x < X; ++x)
      if (mask[z * X + x] && (pivot == X || policy.prob[z * X + x] > policy.prob[z * X + pivot])) pivot = x;
    for (std::size_t x = 0; x < X; ++x)
      if (mask[z * X + x] && x != pivot) out.push_back({z * X + x, z * X + pivot});
  }
  return out;
}

// One Gauss-Newton step on the consistency equations with a forward-difference Jacobian and a
// backtracking search on the residual norm. Returns false when no step reduces the norm.
bool newton_step(const UnifilarFsc& channel, const QGraph& g, InputPolicy& policy, const std::vector<char>& mask, double first_step) {
  Eigen::VectorXd f0, f1;
  if (!consistency(channel, g, policy, f0)) return false;
  const auto dirs = tangent_directions(policy, mask);
  Eigen::MatrixXd jac(f0.size(), static_cast<Eigen::Index>(dirs.size()));
  InputPolicy probe = policy;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const auto [entry, pivot] = dirs[d];
    probe.prob[entry] += kJacobianStep;
    probe.prob[pivot] -= kJacobianStep;
    const bool ok = consistency(channel, g, probe, f1);
    probe.prob[entry] = policy.prob[entry];
    probe.prob[pivot] = policy.prob[pivot];
    if (!ok) return false;
    jac.col(static_cast<Eigen::Index>(d)) = (f1 - f0) / kJacobianStep;
  }
  const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-f0);
  const double norm0 = f0.norm();
  const std::size_t X = policy.input_count;
  for (double t = first_step; t > 1e-10; t *= 0.5) {
    InputPolicy trial = policy;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      trial.prob[dirs[d].entry] += t * delta(static_cast<Eigen::Index>(d));
      trial.prob[dirs[d].pivot] -= t * delta(static_cast<Eigen::Index>(d));
    }
    for (std::size_t z = 0; z < trial.state_count * trial.node_count; ++z) {
      double sum = 0.0;
      for (std::size_t x = 0; x < X; ++x) sum += (trial.prob[z * X + x] = mask[z * X + x] ? std::max(trial.prob[z * X + x], 0.0) : 0.0);
      for (std::size_t x = 0; x < X; ++x) trial.prob[z * X + x] /= sum;
    }
    if (consistency(channel, g, trial, f1) && f1.norm() < (1.0 - 1e-4 * t) * norm0) {
      policy = std::move(trial);
      return true;
    }
  }
  return false;
}

// The ascent keeps every admissible input at a tiny positive probability. Those entries feed
// near-empty states into the posterior comparison, so round them to zero when the chain allows.
void snap_floor(const UnifilarFsc& channel, const QGraph& g, InputPolicy& policy) {
  InputPolicy snapped = policy;
  const std::size_t X = policy.input_count;
  for (std::size_t z = 0; z < policy.state_count * policy.node_count; ++z) {
    auto row = snapped.row(z);
    double sum = 0.0;
    for (double& v : row) sum += (v = v < kSnapBelow ? 0.0 : v);
    for (double& v : row) v /= sum;
  }
  (void)X;
  if (std::isfinite(safe_residual(channel, g, snapped))) policy = std::move(snapped);
}

}  // namespace

double bcjr_residual(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  const auto chain = build_sq_chain(channel, g, policy);
  return residual_from(channel, g, policy, stationary(chain));
}

BcjrSearchResult find_bcjr_policy(const UnifilarFsc& channel, const QGraph& g, const std::optional<InputPolicy>& init,
                                  const BcjrSearchOptions& opts) {
  require_valid(channel);
  InputPolicy start = init ? *init : uniform_policy(channel, g);
  require_valid_policy(channel, g, start);
  BcjrSearchResult best{start, safe_residual(channel, g, start), 0};
  // A supplied policy that already qualifies is returned as is. The uniform default is often
  // trivially invariant at a poor rate, so without `init` the search always climbs first.
  if (init && best.residual <= opts.tol) return best;
  if (!init) best.residual = std::numeric_limits<double>::infinity();

  const auto mask = detail::admissible_mask(channel, g);
  std::size_t used = 0;
  auto refine = [&](InputPolicy policy) {
    while (used < opts.max_iter) {
      const double r = safe_residual(channel, g, policy);
      if (r < best.residual) best = {policy, r, ++used};
      else ++used;
      if (r <= opts.tol || !newton_step(channel, g, policy, mask, opts.damping)) return;
    }
  };
  // First from the rate-maximizing neighbourhood of the start, then from the start itself.
  if (opts.warm_start_iter > 0) {
    try {
      InputPolicy policy = ascend(channel, g, start, 1e-10, opts.warm_start_iter).policy;
      snap_floor(channel, g, policy);
      refine(std::move(policy));
    } catch (const MultichainError&) {
    } catch (const PeriodicError&) {
    }
  }
  if (best.residual > opts.tol) refine(start);
  if (best.residual <= opts.tol) return best;
  std::ostringstream msg;
  msg.precision(3);
  msg << "did not converge (best BCJR residual " << best.residual << ")";
  throw NotConverged(msg.str(), best.residual);
}

}  // namespace fscap
