#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scav/hunt.hpp"

namespace scav {

enum class PlannerKind {
  Proximity,
  Probability,
  ProbProx,
  ExhaustiveBayes,
  Salesman,
  OfflineOptimal,
  Dqn,
  DqnMap,
};

/// CLI/CSV token for a planner kind (e.g. "probprox").
std::string_view to_string(PlannerKind kind);
std::optional<PlannerKind> parse_planner(std::string_view token);

/// The six planners that need no trained policy.
std::span<const PlannerKind> classic_planner_kinds();

// Single-step heuristics. All argmax/argmin comparisons are exact float
// comparisons with lowest-node-index tie-breaking, and the current node is
// never a candidate.

/// Closest node that may still contain an unfound object.
NodeId proximity_next(const WeightedGraph& graph, const BeliefState& belief,
                      NodeId current);

/// Node with the greatest probability of yielding at least one unfound object.
NodeId probability_next(const WeightedGraph& graph, const BeliefState& belief,
                        NodeId current);

/// Node maximizing find-probability divided by travel cost. Zero-probability
/// nodes are never selected.
NodeId prob_prox_next(const WeightedGraph& graph, const BeliefState& belief,
                      NodeId current);

/// Cost of following `path` from `start`, truncated at the first prefix
/// whose visited set (including `start`) covers every required node.
/// Throws std::invalid_argument if the path misses a required node.
double compute_cost(const WeightedGraph& graph, std::span<const NodeId> path,
                    NodeId start, std::span<const NodeId> required_nodes);

struct ExhaustiveOptions {
  int max_candidates = 10;             // permutation base cap
  std::size_t enumeration_cap = 1'000'000;  // posterior product cap
};

/// Open-loop Bayesian search: enumerates all permutations of the
/// positive-support candidate set, scores each by expected truncated cost
/// over the enumerated posterior, and returns the first node of the best
/// (lexicographically smallest among ties) permutation. Throws
/// InfeasibleError when the candidate set exceeds options.max_candidates.
NodeId exhaustive_bayes_next(const WeightedGraph& graph, const BeliefState& belief,
                             NodeId current, const ExhaustiveOptions& options = {});

/// Fixed route through every node with positive prior mass for any object,
/// computed once per hunt. The start node is excluded (observed for free).
std::vector<NodeId> salesman_plan(const WeightedGraph& graph,
                                  const PriorModel& prior, NodeId start);

/// Clairvoyant route through the distinct true object locations.
std::vector<NodeId> offline_optimal_plan(const WeightedGraph& graph,
                                         const Arrangement& truth, NodeId start);

/// Planner adapter for the five kinds that see only (graph, belief,
/// current). Rejects OfflineOptimal and the DQN kinds. The signature
/// guarantees online planners can never observe the hidden arrangement.
std::unique_ptr<Planner> make_online_planner(PlannerKind kind,
                                             const ExhaustiveOptions& options = {});

/// Clairvoyant lower bound; the only planner handed the truth.
std::unique_ptr<Planner> make_offline_planner(Arrangement truth);

}  // namespace scav
