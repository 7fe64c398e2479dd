#include "scav/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "scav/errors.hpp"
#include "scav/rng.hpp"

namespace scav {

WeightedGraph::WeightedGraph(int node_count, std::vector<double> cost,
                             std::vector<Point> coords)
    : node_count_(node_count), cost_(std::move(cost)), coords_(std::move(coords)) {
  if (node_count_ < 1) throw std::invalid_argument("graph needs at least one node");
  const auto l = static_cast<std::size_t>(node_count_);
  if (cost_.size() != l * l)
    throw std::invalid_argument("cost matrix size does not match node count");
  if (!coords_.empty() && coords_.size() != l)
    throw std::invalid_argument("coordinate list size does not match node count");
  for (int i = 0; i < node_count_; ++i) {
    if (cost_[l * i + i] != 0.0)
      throw std::invalid_argument("cost matrix diagonal must be zero");
    for (int j = 0; j < node_count_; ++j) {
      const double c = cost_[l * i + j];
      if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("costs must be finite and non-negative");
      if (c != cost_[l * j + i])
        throw std::invalid_argument("cost matrix must be symmetric");
      max_cost_ = std::max(max_cost_, c);
    }
  }
}

WeightedGraph metric_closure(int node_count, std::span<const double> raw_costs) {
  if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
  const auto l = static_cast<std::size_t>(node_count);
  if (raw_costs.size() != l * l)
    throw std::invalid_argument("raw cost matrix size does not match node count");

  std::vector<double> d(raw_costs.begin(), raw_costs.end());
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      double& c = d[l * i + j];
      if (i == j) {
        c = 0.0;
        continue;
      }
      // negative or non-finite entries mark absent edges
      if (!(c >= 0.0) || !std::isfinite(c)) c = kNoEdge;
    }
  }
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j)
      if (d[l * i + j] != d[l * j + i])
        throw std::invalid_argument("raw cost matrix must be symmetric");

  // Floyd-Warshall
  for (int k = 0; k < node_count; ++k) {
    for (int i = 0; i < node_count; ++i) {
      const double dik = d[l * i + k];
      if (dik == kNoEdge) continue;
      for (int j = 0; j < node_count; ++j) {
        const double via = dik + d[l * k + j];
        if (via < d[l * i + j]) d[l * i + j] = via;
      }
    }
  }

  for (int i = 0; i < node_count; ++i)
    for (int j = 0; j < node_count; ++j)
      if (d[l * i + j] == kNoEdge)
        throw std::invalid_argument("graph is disconnected: no path between nodes " +
                                    std::to_string(i) + " and " + std::to_string(j));

  return WeightedGraph(node_count, std::move(d));
}

WeightedGraph euclidean_graph(std::vector<Point> coords) {
  const int l = static_cast<int>(coords.size());
  if (l < 1) throw std::invalid_argument("graph needs at least one node");
  std::vector<double> d(static_cast<std::size_t>(l) * l, 0.0);
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j) {
      const double dx = coords[i].x - coords[j].x;
      const double dy = coords[i].y - coords[j].y;
      const double c = std::sqrt(dx * dx + dy * dy);
      d[static_cast<std::size_t>(l) * i + j] = c;
      d[static_cast<std::size_t>(l) * j + i] = c;
    }
  }
  return WeightedGraph(l, std::move(d), std::move(coords));
}

WeightedGraph random_euclidean_graph(int node_count, std::uint64_t seed) {
  if (node_count < 1) throw std::invalid_argument("node_count must be at least 1");
  const double extent = 100.0 * node_count;
  Rng rng(seed);
  std::vector<Point> coords(node_count);
  for (auto& p : coords) {
    p.x = rng.uniform(0.0, extent);
    p.y = rng.uniform(0.0, extent);
  }
  return euclidean_graph(std::move(coords));
}

HamiltonianPath shortest_hamiltonian_path(const WeightedGraph& graph, NodeId start,
                                          std::span<const NodeId> targets) {
  const int l = graph.node_count();
  if (start < 0 || start >= l) throw std::invalid_argument("start node out of range");

  std::vector<NodeId> nodes;  // distinct targets, start removed
  bool start_is_target = false;
  for (NodeId t : targets) {
    if (t < 0 || t >= l) throw std::invalid_argument("target node out of range");
    if (t == start) {
      start_is_target = true;
      continue;
    }
    if (std::find(nodes.begin(), nodes.end(), t) == nodes.end()) nodes.push_back(t);
  }
  std::sort(nodes.begin(), nodes.end());

  HamiltonianPath result;
  if (start_is_target) result.order.push_back(start);
  const int m = static_cast<int>(nodes.size());
  if (m == 0) return result;
  if (m > 20) throw InfeasibleError("shortest_hamiltonian_path: more than 20 targets");

  // dp[mask][j]: min cost of a path from start covering `mask`, ending at nodes[j]
  const std::size_t full = std::size_t{1} << m;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full * m, kInf);
  std::vector<int> parent(full * m, -1);
  for (int j = 0; j < m; ++j)
    dp[(std::size_t{1} << j) * m + j] = graph.cost(start, nodes[j]);

  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double base = dp[mask * m + j];
      if (base == kInf) continue;
      for (int nxt = 0; nxt < m; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t nmask = mask | (std::size_t{1} << nxt);
        const double cand = base + graph.cost(nodes[j], nodes[nxt]);
        if (cand < dp[nmask * m + nxt]) {
          dp[nmask * m + nxt] = cand;
          parent[nmask * m + nxt] = j;
        }
      }
    }
  }

  const std::size_t all = full - 1;
  int best_end = 0;
  for (int j = 1; j < m; ++j)
    if (dp[all * m + j] < dp[all * m + best_end]) best_end = j;

  std::vector<NodeId> tail;
  std::size_t mask = all;
  int j = best_end;
  while (j >= 0) {
    tail.push_back(nodes[j]);
    const int p = parent[mask * m + j];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  std::reverse(tail.begin(), tail.end());
  result.order.insert(result.order.end(), tail.begin(), tail.end());
  result.cost = dp[all * m + best_end];
  return result;
}

}  // namespace scav
