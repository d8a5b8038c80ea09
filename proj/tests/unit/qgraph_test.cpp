#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fscap/delay.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"
#include "fscap/qgraph.hpp"
#include "oracles.hpp"

using namespace fscap;

TEST(MarkovQGraph, OrderOne) {
  const auto g = markov_qgraph(1, 2);
  EXPECT_EQ(g.node_count, 2u);
  for (int q = 0; q < 2; ++q)
    for (int y = 0; y < 2; ++y) EXPECT_EQ(g.next(q, y), y);
}

TEST(MarkovQGraph, OrderThreeVector) {
  // 1-indexed vectors [1,3,5,7,1,3,5,7] and [2,4,6,8,2,4,6,8].
  const auto g = markov_qgraph(3, 2);
  ASSERT_EQ(g.node_count, 8u);
  const int zero[] = {1, 3, 5, 7, 1, 3, 5, 7}, one[] = {2, 4, 6, 8, 2, 4, 6, 8};
  for (int q = 0; q < 8; ++q) {
    EXPECT_EQ(g.next(q, 0) + 1, zero[q]);
    EXPECT_EQ(g.next(q, 1) + 1, one[q]);
  }
}

TEST(MarkovQGraph, SingleSymbol) {
  const auto g = markov_qgraph(1, 1);
  EXPECT_EQ(g.node_count, 1u);
  EXPECT_EQ(g.next(0, 0), 0);
}

TEST(MarkovQGraph, SuffixDeterminesNode) {
  for (int k = 1; k <= 3; ++k) {
    const auto g = markov_qgraph(k, 3);
    std::vector<int> seq(k + 2);
    // Every prefix of length 2 followed by the same k-suffix lands on one node.
    for (int suffix = 0; suffix < int(std::pow(3, k)); ++suffix) {
      std::set<int> landed;
      for (int q0 = 0; q0 < int(g.node_count); ++q0)
        for (int prefix = 0; prefix < 9; ++prefix) {
          seq[0] = prefix / 3;
          seq[1] = prefix % 3;
          for (int i = 0, v = suffix; i < k; ++i, v /= 3) seq[2 + k - 1 - i] = v % 3;
          landed.insert(map_sequence(g, q0, seq));
        }
      EXPECT_EQ(landed.size(), 1u) << "k=" << k << " suffix " << suffix;
    }
  }
}

TEST(MapSequence, Examples) {
  const auto g = markov_qgraph(1, 2);
  EXPECT_EQ(map_sequence(g, 1, std::vector<int>{}), 1);
  EXPECT_EQ(map_sequence(g, 0, std::vector<int>{1, 0}), 0);
  // Appendix A vector form; q0 = 1, outputs [0, 1] -> node 2 (1-indexed).
  const auto a = appendix_a_qgraph();
  EXPECT_EQ(map_sequence(a, 0, std::vector<int>{0, 1}) + 1, 2);
  const int zero[] = {1, 3, 1, 3}, one[] = {2, 4, 2, 4};
  for (int q = 0; q < 4; ++q) {
    EXPECT_EQ(a.next(q, 0) + 1, zero[q]);
    EXPECT_EQ(a.next(q, 1) + 1, one[q]);
  }
  EXPECT_THROW(map_sequence(a, 0, std::vector<int>{2}), InvalidArgument);
}

TEST(MakeQGraph, RejectsBrokenTables) {
  EXPECT_THROW(make_qgraph(2, 2, {0, 1, 0}), InvalidArgument);
  EXPECT_THROW(make_qgraph(2, 2, {0, 0, 0, 2}), InvalidArgument);
  EXPECT_THROW(make_qgraph(2, 2, {0, 0, 1, 1}), InvalidArgument);  // node 1 unreachable
  EXPECT_THROW(make_qgraph(3, 1, {1, 1, 2}), InvalidArgument);     // node 2 unreachable
  EXPECT_NO_THROW(make_qgraph(2, 2, {1, 1, 1, 1}));                 // node 0 transient
}

TEST(QGraphNames, Resolve) {
  EXPECT_EQ(qgraph_from_name("markov:k=2", 2), markov_qgraph(2, 2));
  EXPECT_EQ(qgraph_from_name("appendixA", 2), appendix_a_qgraph());
  EXPECT_EQ(qgraph_from_name("appendixC", 4).node_count, 8u);
  EXPECT_THROW(qgraph_from_name("appendixC", 2), InvalidArgument);
  EXPECT_THROW(qgraph_from_name("markov:k=0", 2), InvalidArgument);
  EXPECT_THROW(qgraph_from_name("ring", 2), InvalidArgument);
}

TEST(SqChain, CollapsedGraph) {
  const auto c = make_trapdoor();
  const auto one = make_qgraph(1, 2, {0, 0});
  const auto chain = build_sq_chain(c, one, uniform_policy(c, one));
  ASSERT_EQ(chain.size(), 2u);
  for (std::size_t z = 0; z < 2; ++z) EXPECT_NEAR(chain.at(z, 0) + chain.at(z, 1), 1.0, 1e-12);
}

TEST(SqChain, DeterministicIsZeroOne) {
  const auto c = make_bsc_rll({0.0});
  const auto g = markov_qgraph(1, 2);
  InputPolicy p = uniform_policy(c, g);
  for (std::size_t z = 0; z < 4; ++z) {
    p.row(z)[0] = 1.0;
    p.row(z)[1] = 0.0;
  }
  const auto chain = build_sq_chain(c, g, p);
  for (double v : chain.transition) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Stationary, SymmetricPair) {
  SqChain chain;
  chain.state_count = 2;
  chain.node_count = 1;
  chain.transition = {0.5, 0.5, 0.5, 0.5};
  chain.closed_classes = {{0, 1}};
  chain.aperiodic = {true};
  const auto pi = stationary(chain);
  EXPECT_NEAR(pi[0], 0.5, 1e-15);
  EXPECT_NEAR(pi[1], 0.5, 1e-15);
}

TEST(Stationary, TwoAbsorbingStatesIsMultichain) {
  // Trapdoor with x = s: the output equals the state and the state never changes.
  const auto c = make_trapdoor();
  const auto g = make_qgraph(1, 2, {0, 0});
  InputPolicy p = uniform_policy(c, g);
  p.row(0)[0] = 1.0, p.row(0)[1] = 0.0;
  p.row(1)[0] = 0.0, p.row(1)[1] = 1.0;
  const auto chain = build_sq_chain(c, g, p);
  EXPECT_EQ(chain.closed_classes.size(), 2u);
  try {
    stationary(chain);
    FAIL() << "expected MultichainError";
  } catch (const MultichainError& e) {
    EXPECT_EQ(e.closed_classes(), 2u);
    EXPECT_NE(std::string(e.what()).find("multichain"), std::string::npos);
  }
}

TEST(Stationary, PeriodicIsRejected) {
  // Noiseless RLL BSC alternating 0,1: x = 1 - s at state 0, forced 0 at state 1.
  const auto c = make_bsc_rll({0.0});
  const auto g = make_qgraph(1, 2, {0, 0});
  InputPolicy p = uniform_policy(c, g);
  p.row(0)[0] = 0.0, p.row(0)[1] = 1.0;
  EXPECT_THROW(stationary(build_sq_chain(c, g, p)), PeriodicError);
}

TEST(Stationary, AppendixATable) {
  const auto enc = trapdoor_encoder();
  const auto chain = build_sq_chain(enc.channel.channel, enc.graph, enc.policy);
  const auto pi = stationary(chain);
  // Rows q = 1..4, columns s = (0,0), (0,1), (1,0), (1,1), in units of 1/36.
  const double table[4][4] = {{6, 3, 1, 2}, {1, 2, 0, 3}, {3, 0, 2, 1}, {2, 1, 3, 6}};
  const int cols[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < 4; ++k) {
      const int s = encode_state(enc.channel, {cols[k][0], {cols[k][1]}});
      EXPECT_NEAR(pi[s * 4 + q], table[q][k] / 36.0, 1e-12) << "q=" << q + 1 << " column " << k;
    }
  EXPECT_LT(stationary_residual(chain, pi), 1e-15);
  // Independent elimination agrees.
  const auto ref = oracle::stationary(chain.transition, chain.size());
  for (std::size_t z = 0; z < pi.size(); ++z) EXPECT_NEAR(pi[z], ref[z], 1e-12);
}

TEST(SqChain, RowsSumToOne) {
  std::mt19937_64 rng(3);
  for (const auto& base : {make_trapdoor(), make_bsc_rll({0.2}), make_dec({0.3})}) {
    const auto tc = transform(base, 2);
    const auto g = markov_qgraph(2, base.output_count);
    const auto p = oracle::random_policy(tc.channel, g, rng);
    const auto chain = build_sq_chain(tc.channel, g, p);
    for (std::size_t z = 0; z < chain.size(); ++z) {
      double sum = 0.0;
      for (std::size_t w = 0; w < chain.size(); ++w) sum += chain.at(z, w);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

namespace {

bool reaches_all(const std::vector<int>& phi, std::size_t n, std::size_t m) {
  // Transitive closure; every node must reach every node.
  std::vector<char> r(n * n, 0);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t y = 0; y < m; ++y) r[q * n + phi[q * m + y]] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i * n + j] |= r[i * n + k] & r[k * n + j];
  return std::all_of(r.begin(), r.end(), [](char v) { return v; }) || n == 1;
}

// Brute force: all phi tables, strongly connected, distinct up to relabeling by explicit orbit check.
std::size_t brute_force_count(std::size_t n, std::size_t m) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n * m; ++i) total *= n;
  std::set<std::vector<int>> classes;
  std::vector<int> phi(n * m);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& v : phi) v = int(c % n), c /= n;
    if (!reaches_all(phi, n, m)) continue;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best;
    do {
      std::vector<int> relabeled(n * m);
      // Node perm[q] in the new graph is node q in the old one.
      std::vector<int> inv(n);
      for (std::size_t q = 0; q < n; ++q) inv[perm[q]] = int(q);
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t y = 0; y < m; ++y) relabeled[q * m + y] = perm[phi[inv[q] * m + y]];
      if (best.empty() || relabeled < best) best = relabeled;
    } while (std::next_permutation(perm.begin(), perm.end()));
    classes.insert(best);
  }
  return classes.size();
}

}  // namespace

TEST(Enumerate, CountsMatchBruteForce) {
  EXPECT_EQ(enumerate_qgraphs(1, 2).size(), 1u);
  for (std::size_t n = 1; n <= 3; ++n) EXPECT_EQ(enumerate_qgraphs(n, 2).size(), brute_force_count(n, 2)) << n;
  EXPECT_EQ(enumerate_qgraphs(2, 3).size(), brute_force_count(2, 3));
}

TEST(Enumerate, GraphsAreCanonicalAndConnected) {
  std::size_t seen = 0;
  enumerate_qgraphs(4, 2, [&](const QGraph& g) {
    ++seen;
    EXPECT_TRUE(is_strongly_connected(g));
    EXPECT_EQ(canonical(g), g);
    return true;
  });
  EXPECT_EQ(seen, 892u);
}

TEST(Enumerate, EarlyStop) {
  std::size_t seen = 0;
  const auto n = enumerate_qgraphs(3, 2, [&](const QGraph&) { return ++seen < 5; });
  EXPECT_EQ(n, 5u);
}

TEST(Canonical, Idempotent) {
  for (const auto& g : enumerate_qgraphs(3, 2)) EXPECT_EQ(canonical(canonical(g)), canonical(g));
  const auto c = canonical(appendix_c_qgraph());
  EXPECT_EQ(canonical(c), c);
}

TEST(Policy, Validation) {
  const auto c = make_bsc_rll({0.1});
  const auto g = markov_qgraph(1, 2);
  auto p = uniform_policy(c, g);
  EXPECT_EQ(p.at(1, 0, 1), 0.0);
  EXPECT_EQ(p.at(0, 1, 1), 0.5);
  EXPECT_NO_THROW(require_valid_policy(c, g, p));
  p.prob[p.pair(1, 0) * 2 + 1] = 0.5;
  p.prob[p.pair(1, 0) * 2 + 0] = 0.5;
  EXPECT_THROW(require_valid_policy(c, g, p), InvalidArgument);
  auto q = uniform_policy(c, g);
  q.prob[0] = 0.7;
  EXPECT_THROW(require_valid_policy(c, g, q), InvalidArgument);
}
