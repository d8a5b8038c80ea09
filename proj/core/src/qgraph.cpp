#include "fscap/qgraph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>

#include "detail.hpp"
#include "fscap/error.hpp"

namespace fscap {

namespace {

detail::Adjacency graph_adjacency(const QGraph& g) {
  detail::Adjacency adj(g.node_count);
  for (std::size_t q = 0; q < g.node_count; ++q)
    for (std::size_t y = 0; y < g.output_count; ++y) adj[q].push_back(g.next(q, y));
  return adj;
}

constexpr double kStationaryTolerance = 1e-12;

}  // namespace

QGraph make_qgraph(std::size_t node_count, std::size_t output_count, std::vector<int> phi, std::string name) {
  if (node_count == 0 || output_count == 0) throw InvalidArgument("Q-graph needs at least one node and one output symbol");
  if (phi.size() != node_count * output_count)
    throw InvalidArgument("phi has " + std::to_string(phi.size()) + " entries, expected " + std::to_string(node_count * output_count));
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (phi[i] < 0 || static_cast<std::size_t>(phi[i]) >= node_count)
      throw InvalidArgument("phi(q=" + std::to_string(i / output_count) + ",y=" + std::to_string(i % output_count) +
                            ") = " + std::to_string(phi[i]) + " is not a node");
  QGraph g{std::move(name), node_count, output_count, std::move(phi)};
  const auto adj = graph_adjacency(g);
  const auto seen = detail::reachable_from(adj, 0);
  for (std::size_t q = 0; q < node_count; ++q)
    if (!seen[q]) throw InvalidArgument("Q-graph node " + std::to_string(q) + " is unreachable from node 0");
  const auto closed = detail::closed_classes(adj);
  if (closed.size() != 1) throw InvalidArgument("Q-graph has " + std::to_string(closed.size()) + " closed classes");
  return g;
}

QGraph markov_qgraph(int k, std::size_t output_count) {
  if (k < 1) throw InvalidArgument("Markov Q-graph order must be at least 1, got " + std::to_string(k));
  if (output_count == 0) throw InvalidArgument("output alphabet must be nonempty");
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) {
    if (n > (std::size_t{1} << 24) / output_count) throw InvalidArgument("Markov Q-graph too large");
    n *= output_count;
  }
  std::vector<int> phi(n * output_count);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t y = 0; y < output_count; ++y) phi[q * output_count + y] = static_cast<int>((q * output_count + y) % n);
  return make_qgraph(n, output_count, std::move(phi), "markov:k=" + std::to_string(k));
}

QGraph appendix_a_qgraph() {
  auto g = markov_qgraph(2, 2);
  g.name = "appendixA";
  return g;
}

QGraph appendix_c_qgraph() {
  // Columns: outputs -1, 0, 1, ?.
  const int on_zero[8] = {0, 2, 2, 3, 3, 5, 7, 7};
  const int on_erasure[8] = {1, 6, 6, 6, 6, 4, 6, 6};
  std::vector<int> phi;
  for (int q = 0; q < 8; ++q) {
    phi.push_back(0);
    phi.push_back(on_zero[q]);
    phi.push_back(5);
    phi.push_back(on_erasure[q]);
  }
  return make_qgraph(8, 4, std::move(phi), "appendixC");
}

QGraph qgraph_from_name(const std::string& name, std::size_t output_count) {
  QGraph g;
  if (name == "appendixA") {
    g = appendix_a_qgraph();
  } else if (name == "appendixC") {
    g = appendix_c_qgraph();
  } else if (name.rfind("markov:k=", 0) == 0) {
    const std::string_view rest = std::string_view(name).substr(9);
    int k = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) throw InvalidArgument("bad Markov order in '" + name + "'");
    return markov_qgraph(k, output_count);
  } else {
    throw InvalidArgument("unknown Q-graph '" + name + "'");
  }
  if (g.output_count != output_count)
    throw InvalidArgument("Q-graph '" + name + "' has " + std::to_string(g.output_count) + " output labels, channel has " +
                          std::to_string(output_count));
  return g;
}

int map_sequence(const QGraph& g, int q0, std::span<const int> outputs) {
  if (q0 < 0 || static_cast<std::size_t>(q0) >= g.node_count) throw InvalidArgument("start node out of range");
  int q = q0;
  for (int y : outputs) {
    if (y < 0 || static_cast<std::size_t>(y) >= g.output_count) throw InvalidArgument("output symbol " + std::to_string(y) + " out of range");
    q = g.next(q, y);
  }
  return q;
}

bool is_strongly_connected(const QGraph& g) {
  int count = 0;
  detail::strongly_connected_components(graph_adjacency(g), count);
  return count == 1;
}

InputPolicy uniform_policy(const UnifilarFsc& channel, const QGraph& g) {
  InputPolicy p{channel.state_count, g.node_count, channel.input_count, {}};
  p.prob.assign(p.state_count * p.node_count * p.input_count, 0.0);
  for (std::size_t s = 0; s < channel.state_count; ++s) {
    const auto& adm = channel.admissible[s];
    for (std::size_t q = 0; q < g.node_count; ++q)
      for (int x : adm) p.prob[p.pair(s, q) * p.input_count + x] = 1.0 / static_cast<double>(adm.size());
  }
  return p;
}

void require_valid_policy(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  if (policy.state_count != channel.state_count || policy.node_count != g.node_count || policy.input_count != channel.input_count ||
      policy.prob.size() != policy.state_count * policy.node_count * policy.input_count)
    throw InvalidArgument("policy shape does not match channel and Q-graph");
  if (g.output_count != channel.output_count) throw InvalidArgument("Q-graph and channel output alphabets differ");
  for (std::size_t s = 0; s < policy.state_count; ++s)
    for (std::size_t q = 0; q < policy.node_count; ++q) {
      double sum = 0.0;
      for (std::size_t x = 0; x < policy.input_count; ++x) {
        const double p = policy.at(s, q, x);
        if (!(p >= 0.0 && p <= 1.0))
          throw InvalidArgument("policy entry (s=" + std::to_string(s) + ",q=" + std::to_string(q) + ",x=" + std::to_string(x) + ") outside [0,1]");
        if (p > 0.0 && !channel.allows(s, x))
          throw InvalidArgument("policy puts mass on inadmissible input x=" + std::to_string(x) + " at state " + std::to_string(s));
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidArgument("policy row (s=" + std::to_string(s) + ",q=" + std::to_string(q) + ") does not sum to 1");
    }
}

SqChain build_sq_chain(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy) {
  require_valid_policy(channel, g, policy);
  SqChain c;
  c.state_count = channel.state_count;
  c.node_count = g.node_count;
  const std::size_t n = c.size();
  c.transition.assign(n * n, 0.0);
  detail::Adjacency adj(n);
  for (std::size_t s = 0; s < c.state_count; ++s)
    for (std::size_t q = 0; q < c.node_count; ++q) {
      const std::size_t z = s * c.node_count + q;
      for (int x : channel.admissible[s]) {
        const double px = policy.at(s, q, x);
        if (px <= 0.0) continue;
        for (std::size_t y = 0; y < channel.output_count; ++y) {
          const double w = channel.prob(s, x, y);
          if (w <= 0.0) continue;
          const std::size_t to = static_cast<std::size_t>(channel.next(s, x, y)) * c.node_count + g.next(q, y);
          c.transition[z * n + to] += px * w;
        }
      }
      for (std::size_t to = 0; to < n; ++to)
        if (c.transition[z * n + to] > 0.0) adj[z].push_back(static_cast<int>(to));
    }
  c.closed_classes = detail::closed_classes(adj);
  for (const auto& cls : c.closed_classes) c.aperiodic.push_back(detail::period_of(adj, cls) == 1);
  return c;
}

double stationary_residual(const SqChain& chain, std::span<const double> pi) {
  const std::size_t n = chain.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = -pi[j];
    for (std::size_t i = 0; i < n; ++i) v += pi[i] * chain.transition[i * n + j];
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

std::vector<double> stationary(const SqChain& chain) {
  if (chain.closed_classes.size() != 1) throw MultichainError(chain.closed_classes.size());
  if (!chain.aperiodic.front()) {
    detail::Adjacency adj(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i)
      for (std::size_t j = 0; j < chain.size(); ++j)
        if (chain.at(i, j) > 0.0) adj[i].push_back(static_cast<int>(j));
    throw PeriodicError(detail::period_of(adj, chain.closed_classes.front()));
  }
  const auto& cls = chain.closed_classes.front();
  const Eigen::Index m = static_cast<Eigen::Index>(cls.size());
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = chain.at(cls[j], cls[i]) - (i == j ? 1.0 : 0.0);
  a.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  Eigen::VectorXd sol = a.partialPivLu().solve(rhs);

  std::vector<double> pi(chain.size(), 0.0);
  auto load = [&](const Eigen::VectorXd& v) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) total += std::max(v(i), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) pi[cls[i]] = std::max(v(i), 0.0) / total;
  };
  load(sol);
  if (sol.allFinite() && stationary_residual(chain, pi) <= kStationaryTolerance) return pi;

  // Ill-conditioned solve: fall back to power iteration on the closed class.
  Eigen::MatrixXd p(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) p(i, j) = chain.at(cls[i], cls[j]);
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < 1000000; ++it) {
    Eigen::RowVectorXd w = v * p;
    w /= w.sum();
    const double change = (w - v).cwiseAbs().maxCoeff();
    v = w;
    if (change <= 1e-14) break;
  }
  load(v.transpose());
  return pi;
}

}  // namespace fscap
