#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace scav {

using NodeId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Marks an absent edge in a raw cost matrix handed to metric_closure().
inline constexpr double kNoEdge = std::numeric_limits<double>::infinity();

/// Complete symmetric travel-cost matrix over l nodes. Instances produced
/// by metric_closure() or the Euclidean generators additionally satisfy the
/// triangle inequality, which the planners rely on. Immutable after
/// construction and safe to share across threads.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int node_count, std::vector<double> cost,
                std::vector<Point> coords = {});

  int node_count() const { return node_count_; }
  double cost(NodeId a, NodeId b) const {
    return cost_[static_cast<std::size_t>(a) * node_count_ + b];
  }
  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Point>& coords() const { return coords_; }

  /// Largest pairwise cost; 0 for a single-node graph.
  double max_cost() const { return max_cost_; }

  std::span<const double> raw_costs() const { return cost_; }

 private:
  int node_count_ = 0;
  double max_cost_ = 0.0;
  std::vector<double> cost_;
  std::vector<Point> coords_;
};

/// All-pairs shortest-path closure of a raw l*l cost matrix (row-major,
/// kNoEdge for absent edges). Throws std::invalid_argument naming an
/// unreachable pair if the input graph is disconnected.
WeightedGraph metric_closure(int node_count, std::span<const double> raw_costs);

/// Complete graph with Euclidean costs over the given coordinates.
WeightedGraph euclidean_graph(std::vector<Point> coords);

/// Coordinates i.i.d. uniform in [0, 100*node_count]^2, Euclidean costs.
/// Deterministic given the seed.
WeightedGraph random_euclidean_graph(int node_count, std::uint64_t seed);

struct HamiltonianPath {
  std::vector<NodeId> order;  // visit order, start excluded unless a target
  double cost = 0.0;
};

/// Minimum-cost open path from `start` visiting every target exactly once
/// (Held-Karp subset DP, exact). A target equal to `start` is considered
/// visited at the origin for free and listed first. Empty targets give an
/// empty path of cost 0.
HamiltonianPath shortest_hamiltonian_path(const WeightedGraph& graph,
                                          NodeId start,
                                          std::span<const NodeId> targets);

}  // namespace scav
