#include "fscap/app/search.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

#include "fscap/error.hpp"

namespace fscap::app {

namespace {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) return worker();
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

SearchResult evaluate_all(const TransformedChannel& channel, std::vector<QGraph> graphs, const SearchOptions& opts) {
  SearchResult res;
  std::vector<std::optional<BoundReport>> reports(graphs.size());
  res.scores.resize(graphs.size());
  UpperBoundOptions uo;
  uo.random_starts = opts.random_starts;
  uo.seed = opts.seed;
  parallel_for(graphs.size(), opts.jobs, [&](std::size_t i) {
    auto& score = res.scores[i];
    score.graph = graphs[i];
    try {
      reports[i] = upper_bound(channel, graphs[i], uo);
      score.upper = reports[i]->value;
      score.converged = reports[i]->converged;
      score.status = score.converged ? "ok" : "unconverged";
    } catch (const std::exception& e) {
      score.status = std::string("error: ") + e.what();
    }
  });

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (reports[i]) order.push_back(i);
  // Stable on ties, so the first graph in enumeration order wins.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return reports[a]->value < reports[b]->value; });
  if (order.empty()) return res;
  res.best_upper = reports[order.front()];
  res.best_upper_graph = graphs[order.front()];

  const std::size_t tries = std::min(opts.lower_candidates, order.size());
  std::vector<std::optional<BoundReport>> lowers(tries);
  parallel_for(tries, opts.jobs, [&](std::size_t k) {
    const std::size_t i = order[k];
    try {
      const auto found = find_bcjr_policy(channel.channel, graphs[i], reports[i]->policy);
      lowers[k] = lower_bound(channel, graphs[i], found.policy);
    } catch (const Error&) {
    }
  });
  for (std::size_t k = 0; k < tries; ++k)
    if (lowers[k] && (!res.best_lower || lowers[k]->value > res.best_lower->value)) {
      res.best_lower = lowers[k];
      res.best_lower_graph = graphs[order[k]];
    }
  return res;
}

}  // namespace

SearchResult search_qgraphs(const TransformedChannel& channel, const SearchOptions& opts) {
  if (opts.max_nodes < 1) throw InvalidArgument("max_nodes must be at least 1");
  std::vector<QGraph> graphs;
  for (std::size_t n = 1; n <= opts.max_nodes; ++n) {
    auto batch = enumerate_qgraphs(n, channel.channel.output_count);
    graphs.insert(graphs.end(), batch.begin(), batch.end());
  }
  return evaluate_all(channel, std::move(graphs), opts);
}

SearchResult search_markov(const TransformedChannel& channel, int max_order, const SearchOptions& opts) {
  if (max_order < 1) throw InvalidArgument("Markov order must be at least 1");
  std::vector<QGraph> graphs;
  for (int k = 1; k <= max_order; ++k) graphs.push_back(markov_qgraph(k, channel.channel.output_count));
  return evaluate_all(channel, std::move(graphs), opts);
}

}  // namespace fscap::app
