#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scav/belief.hpp"
#include "scav/graph.hpp"

namespace scav {

/// A hunt environment as stored on disk: graph + prior + start node.
struct Environment {
  WeightedGraph graph;
  PriorModel prior = PriorModel::uniform(1, 1);
  NodeId start = 0;
  std::vector<std::string> object_names;
  std::string name;
};

/// Parses the JSON environment format: exactly one of "nodes" (id/x/y
/// records, Euclidean costs) or "cost_matrix" (row-major, null or negative
/// entries mark absent edges and are closed over shortest paths), plus
/// "objects" ({"name", "locations": {node: prob}}) and "start".
/// Object rows must sum to 1 within 1e-6 and are renormalized exactly.
Environment parse_environment(const std::string& text);

Environment load_environment(const std::string& path);

std::string environment_to_json(const Environment& env);

void save_environment(const Environment& env, const std::string& path);

}  // namespace scav
