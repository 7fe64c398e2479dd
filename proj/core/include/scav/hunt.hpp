#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "scav/belief.hpp"
#include "scav/graph.hpp"

namespace scav {

/// One sampled hunt: the environment plus the hidden truth.
struct HuntInstance {
  WeightedGraph graph;
  PriorModel prior;
  Arrangement truth;
  NodeId start = 0;
};

struct TrajectoryStep {
  NodeId node = 0;
  std::vector<bool> found_after;  // task vector after observing `node`
  double step_cost = 0.0;         // 0 for the initial observation step
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // steps[0] is the start observation
  double total_cost = 0.0;
};

struct HuntOutcome {
  Trajectory trajectory;
  bool completed = false;
  int decisions = 0;
  std::vector<std::chrono::nanoseconds> decision_times;

  std::chrono::nanoseconds total_decision_time() const;
};

/// Next-node chooser. Online planners see only (graph, belief, current);
/// the clairvoyant bound receives the truth at construction instead.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string_view name() const = 0;

  /// Called once per hunt, before the initial observation at the start
  /// node. Planners that precompute a fixed route do so here.
  virtual void begin(const WeightedGraph& graph, const PriorModel& prior,
                     NodeId start) {
    (void)graph, (void)prior, (void)start;
  }

  virtual NodeId next(const WeightedGraph& graph, const BeliefState& belief,
                      NodeId current) = 0;
};

/// 4*l*k, the safety net for planners without a termination guarantee.
int default_step_limit(const HuntInstance& instance);

/// Executes one hunt: observe the start node, then alternate planner
/// decision / travel / observation until every object is found or
/// step_limit decisions have been taken. Wall time is measured around the
/// planner call only. Throws std::logic_error if the planner returns the
/// current node.
HuntOutcome run_hunt(const HuntInstance& instance, Planner& planner,
                     int step_limit);

/// Builds a fresh planner for one evaluation run. The instance carries the
/// arrangement so the clairvoyant bound can be evaluated too; online
/// planner factories must ignore it.
using PlannerFactory =
    std::function<std::unique_ptr<Planner>(const HuntInstance&)>;

/// Exact expectation of the realized cost: runs the planner against every
/// arrangement in the prior's support product, weighted by its
/// probability. Throws InfeasibleError when the product exceeds `cap`.
double expected_policy_cost(const WeightedGraph& graph, const PriorModel& prior,
                            NodeId start, const PlannerFactory& make_planner,
                            std::size_t cap = 1'000'000);

}  // namespace scav
