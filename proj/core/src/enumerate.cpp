#include <algorithm>
#include <numeric>

#include "fscap/error.hpp"
#include "fscap/qgraph.hpp"

namespace fscap {

namespace {

// Renumbers nodes in order of first appearance when scanning phi row by row
// starting from `start`. Returns false if some node is never reached.
bool scan_relabel(const std::vector<int>& phi, std::size_t n, std::size_t outputs, int start, std::vector<int>& out) {
  std::vector<int> label(n, -1), order;
  label[start] = 0;
  order.push_back(start);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t y = 0; y < outputs; ++y) {
      const int w = phi[order[i] * outputs + y];
      if (label[w] == -1) {
        label[w] = static_cast<int>(order.size());
        order.push_back(w);
      }
    }
  if (order.size() != n) return false;
  out.resize(phi.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t y = 0; y < outputs; ++y) out[i * outputs + y] = label[phi[order[i] * outputs + y]];
  return true;
}

}  // namespace

QGraph canonical(const QGraph& g) {
  const std::size_t n = g.node_count, m = g.output_count;
  std::vector<int> perm(n);  // perm[old] = new
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = g.phi, cur(g.phi.size());
  do {
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t y = 0; y < m; ++y) cur[perm[q] * m + y] = perm[g.phi[q * m + y]];
    if (cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  QGraph out = g;
  out.phi = std::move(best);
  return out;
}

std::size_t enumerate_qgraphs(std::size_t node_count, std::size_t output_count, const std::function<bool(const QGraph&)>& visit) {
  if (node_count == 0 || output_count == 0) throw InvalidArgument("enumeration needs at least one node and one output symbol");
  const std::size_t n = node_count, m = output_count, cells = n * m;
  std::vector<int> phi(cells, 0);
  std::vector<int> seen(cells + 1, 0);  // seen[i] = highest node named among phi[0..i)
  std::vector<int> other;
  std::size_t visited = 0;

  // Depth-first over tables in scan normal form from node 0: each cell names
  // at most one new node, and row q is only filled once node q has been named.
  std::size_t i = 0;
  phi[0] = -1;
  while (true) {
    if (i == cells) {
      bool keep = seen[cells] == static_cast<int>(n) - 1;
      if (keep) {
        QGraph g{"", n, m, phi};
        keep = is_strongly_connected(g);
        // One representative per isomorphism class: the smallest scan form over all start nodes.
        for (std::size_t r = 1; keep && r < n; ++r)
          if (scan_relabel(phi, n, m, static_cast<int>(r), other) && other < phi) keep = false;
        if (keep) {
          ++visited;
          g = canonical(g);
          g.name = "enum:n=" + std::to_string(n) + ":#" + std::to_string(visited);
          if (!visit(g)) return visited;
        }
      }
      --i;
    }
    // Advance cell i to its next candidate value.
    const int limit = std::min<int>(seen[i] + 1, static_cast<int>(n) - 1);
    if (phi[i] < limit) {
      ++phi[i];
      seen[i + 1] = std::max(seen[i], phi[i]);
      const std::size_t next_row = (i + 1) / m;
      if ((i + 1) % m == 0 && i + 1 < cells && static_cast<int>(next_row) > seen[i + 1]) continue;
      ++i;
      if (i < cells) phi[i] = -1;
      continue;
    }
    if (i == 0) break;
    --i;
  }
  return visited;
}

std::vector<QGraph> enumerate_qgraphs(std::size_t node_count, std::size_t output_count) {
  std::vector<QGraph> out;
  enumerate_qgraphs(node_count, output_count, [&](const QGraph& g) {
    out.push_back(g);
    return true;
  });
  return out;
}

}  // namespace fscap
