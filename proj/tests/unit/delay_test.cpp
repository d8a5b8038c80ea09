#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <random>

#include "fscap/delay.hpp"
#include "fscap/error.hpp"

using namespace fscap;

TEST(Transform, TrapdoorDelayTwo) {
  const auto tc = transform(make_trapdoor(), 2);
  ASSERT_EQ(tc.channel.state_count, 4u);
  const int s00 = encode_state(tc, {0, {0}}), s01 = encode_state(tc, {0, {1}});
  const int s10 = encode_state(tc, {1, {0}}), s11 = encode_state(tc, {1, {1}});
  for (int x = 0; x < 2; ++x) {
    EXPECT_EQ(tc.channel.prob(s00, x, 0), 1.0);
    EXPECT_EQ(tc.channel.prob(s11, x, 1), 1.0);
    EXPECT_EQ(tc.channel.prob(s01, x, 0), 0.5);
    EXPECT_EQ(tc.channel.prob(s10, x, 1), 0.5);
  }
  EXPECT_TRUE(validate(tc.channel).ok());
}

TEST(Transform, DelayOneIsIdentity) {
  for (const auto& base : {make_trapdoor(), make_bsc_rll({0.2}), make_dec({0.4})}) {
    const auto tc = transform(base, 1);
    EXPECT_EQ(tc.channel.kernel, base.kernel);
    EXPECT_EQ(tc.channel.next_state, base.next_state);
    EXPECT_EQ(tc.channel.admissible, base.admissible);
    for (std::size_t s = 0; s < base.state_count; ++s) EXPECT_EQ(decode_state(tc, s), (DecodedState{int(s), {}}));
  }
}

TEST(Transform, BscRllPrunesConsecutiveOnes) {
  const double p = 0.1;
  const auto tc = transform(make_bsc_rll({p}), 2);
  ASSERT_EQ(tc.channel.state_count, 3u);
  EXPECT_EQ(encode_state(tc, {1, {1}}), -1);
  const int s00 = encode_state(tc, {0, {0}}), s01 = encode_state(tc, {0, {1}}), s10 = encode_state(tc, {1, {0}});
  EXPECT_EQ(s00, 0);
  EXPECT_EQ(s01, 1);
  EXPECT_EQ(s10, 2);
  EXPECT_DOUBLE_EQ(tc.channel.prob(s00, 0, 0), 1 - p);
  EXPECT_EQ(tc.channel.admissible[s01], std::vector<int>{0});
  EXPECT_EQ(tc.channel.admissible[s10], (std::vector<int>{0, 1}));
}

TEST(Transform, RejectsBadDelay) {
  EXPECT_THROW(transform(make_trapdoor(), 0), InvalidArgument);
  EXPECT_THROW(transform(make_trapdoor(), -3), InvalidArgument);
}

TEST(DecodeState, RoundTrips) {
  const auto t2 = transform(make_trapdoor(), 2);
  EXPECT_EQ(decode_state(t2, encode_state(t2, {1, {0}})), (DecodedState{1, {0}}));
  EXPECT_EQ(decode_state(t2, 2), (DecodedState{1, {0}}));
  const auto d3 = transform(make_dec({0.5}), 3);
  EXPECT_EQ(decode_state(d3, encode_state(d3, {0, {1, 0}})), (DecodedState{0, {1, 0}}));
  for (std::size_t i = 0; i < d3.channel.state_count; ++i) EXPECT_EQ(encode_state(d3, decode_state(d3, i)), int(i));
  EXPECT_THROW(decode_state(d3, d3.channel.state_count), InvalidArgument);
}

TEST(Transform, OutputIgnoresCurrentInput) {
  for (const auto& base : {make_trapdoor(), make_bsc_rll({0.3}), make_dec({0.2})})
    for (int d = 2; d <= 4; ++d) {
      const auto tc = transform(base, d);
      const auto& c = tc.channel;
      for (std::size_t s = 0; s < c.state_count; ++s)
        for (int x : c.admissible[s])
          for (int x2 : c.admissible[s])
            for (std::size_t y = 0; y < c.output_count; ++y) ASSERT_EQ(c.prob(s, x, y), c.prob(s, x2, y));
    }
}

TEST(Transform, StateCountWithoutConstraints) {
  for (int d = 1; d <= 5; ++d) {
    EXPECT_EQ(transform(make_trapdoor(), d).channel.state_count, 2u << (d - 1));
    EXPECT_EQ(transform(make_dec({0.3}), d).channel.state_count, 2u << (d - 1));
  }
  // (1,inf)-RLL: histories without "11" and without a 1 right after state 1; Fibonacci counts.
  const std::size_t fib[] = {2, 3, 5, 8, 13};
  for (int d = 1; d <= 5; ++d) EXPECT_EQ(transform(make_bsc_rll({0.1}), d).channel.state_count, fib[d - 1]);
}

namespace {

// Frequencies of (x_t, y_t) on the base channel under i.i.d. uniform admissible inputs.
std::vector<double> base_pairs(const UnifilarFsc& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> counts(c.input_count * c.output_count, 0.0);
  int s = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const int x = std::uniform_int_distribution<int>(0, int(c.input_count) - 1)(rng);
    const auto row = c.row(s, x);
    const int y = std::discrete_distribution<int>(row.begin(), row.end())(rng);
    counts[x * c.output_count + y] += 1;
    s = c.next(s, x, y);
  }
  return counts;
}

// Same statistic from the transformed channel: the output at time t belongs to the input sent d-1 steps earlier.
std::vector<double> transformed_pairs(const TransformedChannel& tc, std::size_t n, std::uint64_t seed) {
  const auto& c = tc.channel;
  std::mt19937_64 rng(seed);
  std::vector<double> counts(c.input_count * c.output_count, 0.0);
  int s = 0;
  for (std::size_t t = 0; t < n + std::size_t(tc.delay); ++t) {
    const int x = std::uniform_int_distribution<int>(0, int(c.input_count) - 1)(rng);
    const auto row = c.row(s, x);
    const int y = std::discrete_distribution<int>(row.begin(), row.end())(rng);
    const auto decoded = decode_state(tc, s);
    const int x_old = decoded.history.empty() ? x : decoded.history.front();
    if (t >= std::size_t(tc.delay)) counts[x_old * c.output_count + y] += 1;
    s = c.next(s, x, y);
  }
  return counts;
}

}  // namespace

TEST(Transform, SimulationMatchesBaseStatistics) {
  const std::size_t n = 100000;
  for (const auto& base : {make_trapdoor(), make_dec({0.3})})
    for (int d : {2, 3}) {
      const auto a = base_pairs(base, n, 11);
      const auto b = transformed_pairs(transform(base, d), n, 12);
      // Two-sample chi-square over the nonempty cells.
      double stat = 0.0;
      int cells = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] + b[i] == 0) continue;
        stat += (a[i] - b[i]) * (a[i] - b[i]) / (a[i] + b[i]);
        ++cells;
      }
      const boost::math::chi_squared dist(cells - 1);
      EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001) << base.name << " d=" << d;
    }
}
