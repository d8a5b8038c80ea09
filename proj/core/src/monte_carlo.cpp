#include <algorithm>
#include <cmath>
#include <random>

#include "fscap/error.hpp"
#include "fscap/graph_bounds.hpp"

namespace fscap {

namespace {

constexpr std::size_t kBurnIn = 1000;
constexpr std::size_t kBatches = 20;
constexpr double kStudent19 = 2.093;  // two-sided 95% quantile, 19 degrees of freedom

// Plug-in I(X,S;Y|Q) from counts over the flattened (q, s, x, y) cell.
class Counts {
 public:
  Counts(std::size_t Q, std::size_t S, std::size_t X, std::size_t Y) : S_(S), X_(X), Y_(Y), full_(Q * S * X * Y, 0) {}

  void add(std::size_t q, std::size_t s, std::size_t x, std::size_t y) { ++full_[((q * S_ + s) * X_ + x) * Y_ + y]; }

  double mutual_information() const {
    const std::size_t Q = full_.size() / (S_ * X_ * Y_);
    double total = 0.0;
    std::vector<double> nq(Q, 0.0), nqy(Q * Y_, 0.0), nqsx(Q * S_ * X_, 0.0);
    for (std::size_t i = 0; i < full_.size(); ++i) {
      const double c = static_cast<double>(full_[i]);
      const std::size_t y = i % Y_, qsx = i / Y_, q = qsx / (S_ * X_);
      nq[q] += c;
      nqy[q * Y_ + y] += c;
      nqsx[qsx] += c;
      total += c;
    }
    if (total <= 0.0) return 0.0;
    double mi = 0.0;
    for (std::size_t i = 0; i < full_.size(); ++i) {
      if (full_[i] == 0) continue;
      const double c = static_cast<double>(full_[i]);
      const std::size_t y = i % Y_, qsx = i / Y_, q = qsx / (S_ * X_);
      mi += c * std::log2(c * nq[q] / (nqsx[qsx] * nqy[q * Y_ + y]));
    }
    return mi / total;
  }

 private:
  std::size_t S_, X_, Y_;
  std::vector<std::uint64_t> full_;
};

}  // namespace

MonteCarloEstimate monte_carlo_rate(const UnifilarFsc& channel, const QGraph& g, const InputPolicy& policy, std::size_t steps,
                                    std::uint64_t seed) {
  require_valid(channel);
  require_valid_policy(channel, g, policy);
  if (steps < kBatches) throw InvalidArgument("monte_carlo_rate needs at least " + std::to_string(kBatches) + " steps");
  const std::size_t S = channel.state_count, Q = g.node_count, X = channel.input_count, Y = channel.output_count;

  // Cumulative law of (x, y) for every pair z = s*Q + q.
  std::vector<std::vector<std::pair<double, std::size_t>>> table(S * Q);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t q = 0; q < Q; ++q) {
      double acc = 0.0;
      for (std::size_t x = 0; x < X; ++x)
        for (std::size_t y = 0; y < Y; ++y) {
          const double p = policy.at(s, q, x) * channel.prob(s, x, y);
          if (p <= 0.0) continue;
          acc += p;
          table[s * Q + q].emplace_back(acc, x * Y + y);
        }
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t s = 0, q = 0;
  auto step = [&](auto&& record) {
    const auto& cdf = table[s * Q + q];
    const double u = unit(rng) * cdf.back().first;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u, [](const auto& e, double v) { return e.first < v; });
    if (it == cdf.end()) --it;
    const std::size_t x = it->second / Y, y = it->second % Y;
    record(q, s, x, y);
    s = static_cast<std::size_t>(channel.next(s, x, y));
    q = static_cast<std::size_t>(g.next(q, y));
  };
  for (std::size_t i = 0; i < kBurnIn; ++i) step([](std::size_t, std::size_t, std::size_t, std::size_t) {});

  Counts all(Q, S, X, Y);
  std::vector<double> batch_values;
  const std::size_t per_batch = steps / kBatches;
  for (std::size_t b = 0; b < kBatches; ++b) {
    Counts batch(Q, S, X, Y);
    const std::size_t n = (b + 1 == kBatches) ? steps - per_batch * (kBatches - 1) : per_batch;
    for (std::size_t i = 0; i < n; ++i)
      step([&](std::size_t qq, std::size_t ss, std::size_t xx, std::size_t yy) {
        all.add(qq, ss, xx, yy);
        batch.add(qq, ss, xx, yy);
      });
    batch_values.push_back(batch.mutual_information());
  }

  double mean = 0.0;
  for (double v : batch_values) mean += v;
  mean /= static_cast<double>(kBatches);
  double var = 0.0;
  for (double v : batch_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(kBatches - 1);
  const double half = kStudent19 * std::sqrt(var / static_cast<double>(kBatches));

  MonteCarloEstimate est;
  est.steps = steps;
  est.value = all.mutual_information();
  est.ci_low = est.value - half;
  est.ci_high = est.value + half;
  return est;
}

}  // namespace fscap
