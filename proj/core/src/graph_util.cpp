#include <algorithm>
#include <queue>
#include <utility>

#include "detail.hpp"

namespace fscap::detail {

std::vector<int> strongly_connected_components(const Adjacency& adj, int& component_count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0;
  component_count = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge == 0 && index[v] == -1) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (edge < adj[v].size()) {
        const int w = adj[v][edge++];
        if (index[w] == -1) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = component_count;
        } while (w != v);
        ++component_count;
      }
      const int finished = v;
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

std::vector<std::vector<int>> closed_classes(const Adjacency& adj) {
  int count = 0;
  const auto comp = strongly_connected_components(adj, count);
  std::vector<char> leaks(count, 0);
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (int w : adj[v])
      if (comp[w] != comp[v]) leaks[comp[v]] = 1;
  std::vector<std::vector<int>> members(count);
  for (std::size_t v = 0; v < adj.size(); ++v) members[comp[v]].push_back(static_cast<int>(v));
  std::vector<std::vector<int>> out;
  for (int c = 0; c < count; ++c)
    if (!leaks[c]) out.push_back(std::move(members[c]));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> reachable_from(const Adjacency& adj, int start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
  }
  return seen;
}

std::size_t period_of(const Adjacency& adj, const std::vector<int>& members) {
  if (members.empty()) return 0;
  std::vector<long> level(adj.size(), -1);
  std::vector<char> inside(adj.size(), 0);
  for (int v : members) inside[v] = 1;
  std::queue<int> bfs;
  level[members.front()] = 0;
  bfs.push(members.front());
  long g = 0;
  while (!bfs.empty()) {
    const int v = bfs.front();
    bfs.pop();
    for (int w : adj[v]) {
      if (!inside[w]) continue;
      if (level[w] == -1) {
        level[w] = level[v] + 1;
        bfs.push(w);
      } else {
        g = std::gcd(g, std::labs(level[v] + 1 - level[w]));
      }
    }
  }
  return static_cast<std::size_t>(g);
}

void project_to_simplex(std::span<double> v, std::span<const char> mask) {
  std::vector<double> active;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask[i]) active.push_back(v[i]);
  if (active.empty()) return;
  std::vector<double> sorted = active;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? std::max(v[i] - theta, 0.0) : 0.0;
}

}  // namespace fscap::detail
