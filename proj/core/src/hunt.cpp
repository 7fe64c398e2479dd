#include "scav/hunt.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "scav/errors.hpp"

namespace scav {

namespace {

std::vector<ObjectId> objects_at(const Arrangement& truth, NodeId node,
                                 const BeliefState& belief) {
  std::vector<ObjectId> present;
  for (ObjectId o = 0; o < static_cast<ObjectId>(truth.size()); ++o)
    if (truth[o] == node && !belief.found(o)) present.push_back(o);
  return present;
}

}  // namespace

std::chrono::nanoseconds HuntOutcome::total_decision_time() const {
  return std::accumulate(decision_times.begin(), decision_times.end(),
                         std::chrono::nanoseconds{0});
}

int default_step_limit(const HuntInstance& instance) {
  return 4 * instance.graph.node_count() * instance.prior.object_count();
}

HuntOutcome run_hunt(const HuntInstance& instance, Planner& planner,
                     int step_limit) {
  const WeightedGraph& graph = instance.graph;
  if (instance.start < 0 || instance.start >= graph.node_count())
    throw std::invalid_argument("run_hunt: start node out of range");
  if (instance.truth.size() != static_cast<std::size_t>(instance.prior.object_count()))
    throw std::invalid_argument("run_hunt: arrangement size does not match prior");
  if (step_limit <= 0) throw std::invalid_argument("run_hunt: step_limit must be positive");

  planner.begin(graph, instance.prior, instance.start);

  BeliefState belief(instance.prior);
  HuntOutcome outcome;
  NodeId current = instance.start;

  // The agent observes its start node before the first decision.
  belief.update_on_visit(current, objects_at(instance.truth, current, belief));
  outcome.trajectory.steps.push_back({current, belief.found_flags(), 0.0});

  while (!belief.all_found() && outcome.decisions < step_limit) {
    const auto t0 = std::chrono::steady_clock::now();
    const NodeId chosen = planner.next(graph, belief, current);
    const auto t1 = std::chrono::steady_clock::now();
    outcome.decision_times.push_back(t1 - t0);
    ++outcome.decisions;

    if (chosen < 0 || chosen >= graph.node_count())
      throw std::logic_error("planner " + std::string(planner.name()) +
                             " returned an invalid node");
    if (chosen == current)
      throw std::logic_error("planner " + std::string(planner.name()) +
                             " returned the current node");

    const double step_cost = graph.cost(current, chosen);
    current = chosen;
    belief.update_on_visit(current, objects_at(instance.truth, current, belief));
    outcome.trajectory.steps.push_back({current, belief.found_flags(), step_cost});
    outcome.trajectory.total_cost += step_cost;
  }

  outcome.completed = belief.all_found();
  return outcome;
}

double expected_policy_cost(const WeightedGraph& graph, const PriorModel& prior,
                            NodeId start, const PlannerFactory& make_planner,
                            std::size_t cap) {
  const BeliefState fresh(prior);
  const ArrangementEnumeration worlds = enumerate_posterior_arrangements(fresh, cap);

  double expected = 0.0;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    Arrangement truth(prior.object_count(), -1);
    for (std::size_t j = 0; j < worlds.objects.size(); ++j)
      truth[worlds.objects[j]] = worlds.nodes[i][j];
    HuntInstance instance{graph, prior, std::move(truth), start};
    auto planner = make_planner(instance);
    const HuntOutcome outcome =
        run_hunt(instance, *planner, default_step_limit(instance));
    if (!outcome.completed)
      throw std::logic_error("expected_policy_cost: planner failed to complete a hunt");
    expected += worlds.probabilities[i] * outcome.trajectory.total_cost;
  }
  return expected;
}

}  // namespace scav
