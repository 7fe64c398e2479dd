#include "scav/planners.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "scav/errors.hpp"

namespace scav {

std::string_view to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Proximity: return "proximity";
    case PlannerKind::Probability: return "probability";
    case PlannerKind::ProbProx: return "probprox";
    case PlannerKind::ExhaustiveBayes: return "exhaustive";
    case PlannerKind::Salesman: return "salesman";
    case PlannerKind::OfflineOptimal: return "optimal";
    case PlannerKind::Dqn: return "dqn";
    case PlannerKind::DqnMap: return "dqnmap";
  }
  return "unknown";
}

std::optional<PlannerKind> parse_planner(std::string_view token) {
  for (PlannerKind k :
       {PlannerKind::Proximity, PlannerKind::Probability, PlannerKind::ProbProx,
        PlannerKind::ExhaustiveBayes, PlannerKind::Salesman,
        PlannerKind::OfflineOptimal, PlannerKind::Dqn, PlannerKind::DqnMap})
    if (token == to_string(k)) return k;
  return std::nullopt;
}

std::span<const PlannerKind> classic_planner_kinds() {
  static constexpr std::array<PlannerKind, 6> kinds = {
      PlannerKind::Proximity,     PlannerKind::Probability,
      PlannerKind::ProbProx,      PlannerKind::ExhaustiveBayes,
      PlannerKind::Salesman,      PlannerKind::OfflineOptimal,
  };
  return kinds;
}

namespace {

[[noreturn]] void throw_no_candidate() {
  throw InconsistencyError("no node carries positive posterior mass for an unfound object");
}

}  // namespace

NodeId proximity_next(const WeightedGraph& graph, const BeliefState& belief,
                      NodeId current) {
  NodeId best = -1;
  double best_cost = 0.0;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == current) continue;
    bool possible = false;
    for (ObjectId o = 0; o < belief.object_count(); ++o)
      if (!belief.found(o) && belief.posterior(o, n) > 0.0) {
        possible = true;
        break;
      }
    if (!possible) continue;
    const double c = graph.cost(current, n);
    if (best < 0 || c < best_cost) {
      best = n;
      best_cost = c;
    }
  }
  if (best < 0) throw_no_candidate();
  return best;
}

NodeId probability_next(const WeightedGraph& graph, const BeliefState& belief,
                        NodeId current) {
  NodeId best = -1;
  double best_p = 0.0;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == current) continue;
    const double p = belief.prob_any_unfound(n);
    if (p <= 0.0) continue;
    if (best < 0 || p > best_p) {
      best = n;
      best_p = p;
    }
  }
  if (best < 0) throw_no_candidate();
  return best;
}

NodeId prob_prox_next(const WeightedGraph& graph, const BeliefState& belief,
                      NodeId current) {
  NodeId best = -1;
  double best_score = 0.0;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == current) continue;
    const double p = belief.prob_any_unfound(n);
    if (p <= 0.0) continue;
    const double score = p / graph.cost(current, n);
    if (best < 0 || score > best_score) {
      best = n;
      best_score = score;
    }
  }
  if (best < 0) throw_no_candidate();
  return best;
}

double compute_cost(const WeightedGraph& graph, std::span<const NodeId> path,
                    NodeId start, std::span<const NodeId> required_nodes) {
  std::vector<bool> needed(graph.node_count(), false);
  int outstanding = 0;
  for (NodeId n : required_nodes) {
    if (n < 0 || n >= graph.node_count())
      throw std::invalid_argument("compute_cost: required node out of range");
    if (!needed[n] && n != start) {
      needed[n] = true;
      ++outstanding;
    }
  }
  double cost = 0.0;
  NodeId at = start;
  for (NodeId n : path) {
    if (outstanding == 0) break;
    cost += graph.cost(at, n);
    at = n;
    if (needed[n]) {
      needed[n] = false;
      --outstanding;
    }
  }
  if (outstanding > 0)
    throw std::invalid_argument("compute_cost: path does not cover a required node");
  return cost;
}

NodeId exhaustive_bayes_next(const WeightedGraph& graph, const BeliefState& belief,
                             NodeId current, const ExhaustiveOptions& options) {
  // Candidate set: every node that may still hold an unfound object.
  std::vector<NodeId> candidates;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == current) continue;
    for (ObjectId o = 0; o < belief.object_count(); ++o)
      if (!belief.found(o) && belief.posterior(o, n) > 0.0) {
        candidates.push_back(n);
        break;
      }
  }
  if (candidates.empty()) throw_no_candidate();
  if (static_cast<int>(candidates.size()) > options.max_candidates)
    throw InfeasibleError("exhaustive search over " +
                          std::to_string(candidates.size()) +
                          " candidate nodes exceeds the cap of " +
                          std::to_string(options.max_candidates) +
                          "; use a heuristic planner");

  const ArrangementEnumeration worlds =
      enumerate_posterior_arrangements(belief, options.enumeration_cap);
  const std::size_t m = candidates.size();

  // Per world, the distinct required nodes (deduplicated via node marks).
  std::vector<std::vector<NodeId>> world_nodes(worlds.size());
  std::vector<char> mark(graph.node_count(), 0);
  for (std::size_t w = 0; w < worlds.size(); ++w) {
    for (NodeId n : worlds.nodes[w]) {
      if (!mark[n]) {
        mark[n] = 1;
        world_nodes[w].push_back(n);
      }
    }
    for (NodeId n : world_nodes[w]) mark[n] = 0;
  }

  std::vector<NodeId> perm = candidates;  // sorted ascending already
  std::vector<double> prefix_cost(m + 1, 0.0);
  std::vector<int> position(graph.node_count(), -1);

  std::vector<NodeId> best_perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    for (std::size_t i = 0; i < m; ++i) {
      const NodeId from = i == 0 ? current : perm[i - 1];
      prefix_cost[i + 1] = prefix_cost[i] + graph.cost(from, perm[i]);
      position[perm[i]] = static_cast<int>(i);
    }
    // Expected cost: each world truncates at its latest required node.
    double expected = 0.0;
    for (std::size_t w = 0; w < worlds.size(); ++w) {
      int last = 0;
      for (NodeId n : world_nodes[w]) last = std::max(last, position[n] + 1);
      expected += worlds.probabilities[w] * prefix_cost[last];
    }
    if (expected < best_cost) {
      best_cost = expected;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return best_perm.front();
}

std::vector<NodeId> salesman_plan(const WeightedGraph& graph,
                                  const PriorModel& prior, NodeId start) {
  std::vector<NodeId> targets;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == start) continue;
    for (ObjectId o = 0; o < prior.object_count(); ++o)
      if (prior.prob(o, n) > 0.0) {
        targets.push_back(n);
        break;
      }
  }
  return shortest_hamiltonian_path(graph, start, targets).order;
}

std::vector<NodeId> offline_optimal_plan(const WeightedGraph& graph,
                                         const Arrangement& truth, NodeId start) {
  std::vector<NodeId> targets;
  for (NodeId n : truth)
    if (n != start && std::find(targets.begin(), targets.end(), n) == targets.end())
      targets.push_back(n);
  return shortest_hamiltonian_path(graph, start, targets).order;
}

namespace {

class ProximityPlanner final : public Planner {
 public:
  std::string_view name() const override { return to_string(PlannerKind::Proximity); }
  NodeId next(const WeightedGraph& g, const BeliefState& b, NodeId c) override {
    return proximity_next(g, b, c);
  }
};

class ProbabilityPlanner final : public Planner {
 public:
  std::string_view name() const override { return to_string(PlannerKind::Probability); }
  NodeId next(const WeightedGraph& g, const BeliefState& b, NodeId c) override {
    return probability_next(g, b, c);
  }
};

class ProbProxPlanner final : public Planner {
 public:
  std::string_view name() const override { return to_string(PlannerKind::ProbProx); }
  NodeId next(const WeightedGraph& g, const BeliefState& b, NodeId c) override {
    return prob_prox_next(g, b, c);
  }
};

class ExhaustivePlanner final : public Planner {
 public:
  explicit ExhaustivePlanner(ExhaustiveOptions options) : options_(options) {}
  std::string_view name() const override {
    return to_string(PlannerKind::ExhaustiveBayes);
  }
  NodeId next(const WeightedGraph& g, const BeliefState& b, NodeId c) override {
    return exhaustive_bayes_next(g, b, c, options_);
  }

 private:
  ExhaustiveOptions options_;
};

/// Follows a fixed route computed in begin().
class RoutePlanner : public Planner {
 public:
  NodeId next(const WeightedGraph&, const BeliefState&, NodeId) override {
    if (index_ >= route_.size())
      throw InconsistencyError(std::string(name()) +
                               ": route exhausted before all objects were found");
    return route_[index_++];
  }

 protected:
  std::vector<NodeId> route_;
  std::size_t index_ = 0;
};

class SalesmanPlanner final : public RoutePlanner {
 public:
  std::string_view name() const override { return to_string(PlannerKind::Salesman); }
  void begin(const WeightedGraph& graph, const PriorModel& prior,
             NodeId start) override {
    route_ = salesman_plan(graph, prior, start);
    index_ = 0;
  }
};

class OfflineOptimalPlanner final : public RoutePlanner {
 public:
  explicit OfflineOptimalPlanner(Arrangement truth) : truth_(std::move(truth)) {}
  std::string_view name() const override {
    return to_string(PlannerKind::OfflineOptimal);
  }
  void begin(const WeightedGraph& graph, const PriorModel&, NodeId start) override {
    route_ = offline_optimal_plan(graph, truth_, start);
    index_ = 0;
  }

 private:
  Arrangement truth_;
};

}  // namespace

std::unique_ptr<Planner> make_online_planner(PlannerKind kind,
                                             const ExhaustiveOptions& options) {
  switch (kind) {
    case PlannerKind::Proximity: return std::make_unique<ProximityPlanner>();
    case PlannerKind::Probability: return std::make_unique<ProbabilityPlanner>();
    case PlannerKind::ProbProx: return std::make_unique<ProbProxPlanner>();
    case PlannerKind::ExhaustiveBayes:
      return std::make_unique<ExhaustivePlanner>(options);
    case PlannerKind::Salesman: return std::make_unique<SalesmanPlanner>();
    default:
      throw std::invalid_argument(
          "make_online_planner: kind requires the truth or a trained policy");
  }
}

std::unique_ptr<Planner> make_offline_planner(Arrangement truth) {
  return std::make_unique<OfflineOptimalPlanner>(std::move(truth));
}

}  // namespace scav
