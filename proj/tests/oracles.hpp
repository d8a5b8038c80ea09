#pragma once

// Reference computations written independently of the library: dense
// Gaussian elimination for stationary laws and rates straight from the joint
// distribution. Slow, but small enough to audit by eye.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "fscap/channels.hpp"
#include "fscap/qgraph.hpp"

namespace oracle {

inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Solves pi P = pi, sum pi = 1 for an irreducible-on-its-support chain by Gaussian elimination with partial pivoting.
inline std::vector<double> stationary(const std::vector<double>& P, std::size_t n) {
  // Rows: (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<double> A(n * (n + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i * (n + 1) + j] = P[j * n + i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) A[(n - 1) * (n + 1) + j] = 1.0;
  A[(n - 1) * (n + 1) + n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r * (n + 1) + c]) > std::abs(A[piv * (n + 1) + c])) piv = r;
    for (std::size_t k = 0; k <= n; ++k) std::swap(A[c * (n + 1) + k], A[piv * (n + 1) + k]);
    const double d = A[c * (n + 1) + c];
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A[r * (n + 1) + c] / d;
      for (std::size_t k = c; k <= n; ++k) A[r * (n + 1) + k] -= f * A[c * (n + 1) + k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = A[i * (n + 1) + n] / A[i * (n + 1) + i];
  return pi;
}

/// (S,Q) transition matrix, index s*|Q|+q.
inline std::vector<double> sq_transition(const fscap::UnifilarFsc& c, const fscap::QGraph& g, const fscap::InputPolicy& pol) {
  const std::size_t nq = g.node_count, n = c.state_count * nq;
  std::vector<double> P(n * n, 0.0);
  for (std::size_t s = 0; s < c.state_count; ++s)
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t x = 0; x < c.input_count; ++x)
        for (std::size_t y = 0; y < c.output_count; ++y) {
          const double w = pol.at(s, q, x) * c.prob(s, x, y);
          if (w == 0.0) continue;
          const std::size_t to = static_cast<std::size_t>(c.next(s, x, y)) * nq + static_cast<std::size_t>(g.next(q, y));
          P[(s * nq + q) * n + to] += w;
        }
  return P;
}

/// I(X,S;Y|Q) = H(Y|Q) - H(Y|X,S,Q) from the stationary joint.
inline double rate(const fscap::UnifilarFsc& c, const fscap::QGraph& g, const fscap::InputPolicy& pol) {
  const std::size_t nq = g.node_count, n = c.state_count * nq;
  const auto pi = stationary(sq_transition(c, g, pol), n);
  std::vector<double> pqy(nq * c.output_count, 0.0), pq(nq, 0.0);
  double h_cond = 0.0;
  for (std::size_t s = 0; s < c.state_count; ++s)
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t x = 0; x < c.input_count; ++x) {
        const double w = pi[s * nq + q] * pol.at(s, q, x);
        for (std::size_t y = 0; y < c.output_count; ++y) {
          pqy[q * c.output_count + y] += w * c.prob(s, x, y);
          h_cond += w * plogp(c.prob(s, x, y));
        }
        pq[q] += w;
      }
  double h_y_q = 0.0;
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t y = 0; y < c.output_count; ++y)
      if (pq[q] > 0.0) h_y_q += pq[q] * plogp(pqy[q * c.output_count + y] / pq[q]);
  return h_y_q - h_cond;
}

/// max |P(s+ | q, y) - pi(s+ | q+)| over (q, y) with positive probability.
inline double bcjr_residual(const fscap::UnifilarFsc& c, const fscap::QGraph& g, const fscap::InputPolicy& pol) {
  const std::size_t nq = g.node_count, ns = c.state_count;
  const auto pi = stationary(sq_transition(c, g, pol), ns * nq);
  double worst = 0.0;
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t y = 0; y < c.output_count; ++y) {
      std::vector<double> post(ns, 0.0);
      double total = 0.0;
      for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t x = 0; x < c.input_count; ++x) {
          const double w = pi[s * nq + q] * pol.at(s, q, x) * c.prob(s, x, y);
          if (w == 0.0) continue;
          post[static_cast<std::size_t>(c.next(s, x, y))] += w;
          total += w;
        }
      if (total <= 1e-15) continue;
      const std::size_t qn = static_cast<std::size_t>(g.next(q, y));
      double mass = 0.0;
      for (std::size_t s = 0; s < ns; ++s) mass += pi[s * nq + qn];
      for (std::size_t s = 0; s < ns; ++s) worst = std::max(worst, std::abs(post[s] / total - pi[s * nq + qn] / mass));
    }
  return worst;
}

/// Strictly positive random policy on the admissible inputs.
inline fscap::InputPolicy random_policy(const fscap::UnifilarFsc& c, const fscap::QGraph& g, std::mt19937_64& rng,
                                        double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  fscap::InputPolicy p;
  p.state_count = c.state_count;
  p.node_count = g.node_count;
  p.input_count = c.input_count;
  p.prob.assign(c.state_count * g.node_count * c.input_count, 0.0);
  for (std::size_t s = 0; s < c.state_count; ++s)
    for (std::size_t q = 0; q < g.node_count; ++q) {
      double sum = 0.0;
      for (int x : c.admissible[s]) sum += p.prob[p.pair(s, q) * c.input_count + x] = u(rng);
      for (int x : c.admissible[s]) p.prob[p.pair(s, q) * c.input_count + x] /= sum;
    }
  return p;
}

inline double kl_bits(const std::vector<double>& p, const std::vector<double>& t) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) d += p[i] * std::log2(p[i] / t[i]);
  return d;
}

}  // namespace oracle
