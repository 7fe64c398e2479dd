#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "scav/bench.hpp"
#include "scav/errors.hpp"
#include "scav/planners.hpp"

using namespace scav;

namespace {

WeightedGraph triangle_graph() {
  return WeightedGraph(3, {0, 1, 2, 1, 0, 1, 2, 1, 0});
}

BeliefState one_object_belief(double at1, double at2) {
  return BeliefState{PriorModel(1, 3, {0.0, at1, at2})};
}

}  // namespace

TEST_CASE("planner tokens round-trip") {
  for (PlannerKind kind :
       {PlannerKind::Proximity, PlannerKind::Probability, PlannerKind::ProbProx,
        PlannerKind::ExhaustiveBayes, PlannerKind::Salesman,
        PlannerKind::OfflineOptimal, PlannerKind::Dqn, PlannerKind::DqnMap})
    CHECK(parse_planner(to_string(kind)) == kind);
  CHECK_FALSE(parse_planner("bogus").has_value());
}

TEST_CASE("proximity picks the nearest node with positive mass") {
  const WeightedGraph g = triangle_graph();
  CHECK(proximity_next(g, one_object_belief(0.3, 0.7), 0) == 1);
  CHECK(proximity_next(g, one_object_belief(0.0, 1.0), 0) == 2);

  SUBCASE("ties break to the lower index") {
    const WeightedGraph equilateral(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    CHECK(proximity_next(equilateral, one_object_belief(0.5, 0.5), 0) == 1);
  }
  SUBCASE("no positive mass is inconsistent") {
    BeliefState belief = one_object_belief(1.0, 0.0);
    belief.update_on_visit(2, {});
    // the only support left is node 1; from node 1 nothing else qualifies
    const ObjectId o = 0;
    belief.update_on_visit(1, {&o, 1});
    CHECK_THROWS_AS(proximity_next(triangle_graph(), belief, 1), InconsistencyError);
  }
}

TEST_CASE("probability picks the highest find probability") {
  const WeightedGraph g = triangle_graph();
  CHECK(probability_next(g, one_object_belief(0.3, 0.7), 0) == 2);

  SUBCASE("ties break to the lower index") {
    CHECK(probability_next(g, one_object_belief(0.5, 0.5), 0) == 1);
  }
  SUBCASE("stacked objects combine through the product rule") {
    // two objects at 0.4 each on node 1 beat a single 0.6 on node 2:
    // 1 - 0.6^2 = 0.64 > 0.6 (residual mass sits on the excluded current node)
    BeliefState belief{PriorModel(3, 3,
                                  {0.6, 0.4, 0.0,
                                   0.6, 0.4, 0.0,
                                   0.4, 0.0, 0.6})};
    REQUIRE(belief.prob_any_unfound(1) == doctest::Approx(0.64).epsilon(1e-12));
    REQUIRE(belief.prob_any_unfound(2) == doctest::Approx(0.60).epsilon(1e-12));
    CHECK(probability_next(g, belief, 0) == 1);
  }
}

TEST_CASE("probability-proximity scores probability per unit distance") {
  const WeightedGraph g = triangle_graph();
  // node 1: 0.3/1 = 0.3, node 2: 0.7/2 = 0.35
  CHECK(prob_prox_next(g, one_object_belief(0.3, 0.7), 0) == 2);
  CHECK(prob_prox_next(g, one_object_belief(0.9, 0.1), 0) == 1);

  SUBCASE("uniformly rescaling the costs never changes the choice") {
    Rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
      const int l = rng.uniform_int(3, 8);
      const WeightedGraph base = random_euclidean_graph(l, rng.next_u64());
      const PriorModel prior = test::random_prior(3, l, rng);
      const double scale = rng.uniform(0.1, 25.0);
      std::vector<double> scaled(base.raw_costs().begin(), base.raw_costs().end());
      for (double& c : scaled) c *= scale;
      const WeightedGraph rescaled(l, std::move(scaled));
      const BeliefState belief{prior};
      const NodeId current = rng.uniform_int(0, l - 1);
      CHECK(prob_prox_next(base, belief, current) ==
            prob_prox_next(rescaled, belief, current));
    }
  }
}

TEST_CASE("compute_cost truncates at the covering prefix") {
  const WeightedGraph g = triangle_graph();

  SUBCASE("object at the first path node costs one hop") {
    const std::vector<NodeId> path = {1, 2};
    const std::vector<NodeId> required = {1};
    CHECK(compute_cost(g, path, 0, required) == 1.0);
  }
  SUBCASE("fixture path [1,2] with the object at node 2") {
    const std::vector<NodeId> path = {1, 2};
    const std::vector<NodeId> required = {2};
    CHECK(compute_cost(g, path, 0, required) == 2.0);
  }
  SUBCASE("required node already at the start is free") {
    const std::vector<NodeId> path = {1};
    const std::vector<NodeId> required = {0};
    CHECK(compute_cost(g, path, 0, required) == 0.0);
  }
  SUBCASE("a path missing a required node is an error") {
    const std::vector<NodeId> path = {1};
    const std::vector<NodeId> required = {2};
    CHECK_THROWS_AS(compute_cost(g, path, 0, required), std::invalid_argument);
  }
  SUBCASE("matches the simulate-the-path oracle on random instances") {
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
      const int l = rng.uniform_int(3, 9);
      const WeightedGraph graph = random_euclidean_graph(l, rng.next_u64());
      std::vector<NodeId> path;
      for (int id : rng.sample_without_replacement(l, rng.uniform_int(1, l)))
        path.push_back(id);
      const NodeId start = rng.uniform_int(0, l - 1);
      std::vector<NodeId> required;
      for (int i = 0; i < 3; ++i) {
        const NodeId n = path[rng.uniform_int(0, static_cast<int>(path.size()) - 1)];
        required.push_back(n);
      }
      CHECK(compute_cost(graph, path, start, required) ==
            test::simulate_path_cost(graph, path, start, required));
    }
  }
}

TEST_CASE("exhaustive search evaluates both worlds on the fixture") {
  const WeightedGraph g = triangle_graph();
  // path [1,2]: 0.5*1 + 0.5*2 = 1.5; path [2,1]: 0.5*2 + 0.5*3 = 2.5
  CHECK(exhaustive_bayes_next(g, one_object_belief(0.5, 0.5), 0) == 1);
}

TEST_CASE("exhaustive search with a single candidate returns it") {
  CHECK(exhaustive_bayes_next(triangle_graph(), one_object_belief(0.0, 1.0), 0) == 2);
}

TEST_CASE("exhaustive search over point-mass beliefs mirrors the clairvoyant plan") {
  Rng rng(161);
  for (int trial = 0; trial < 30; ++trial) {
    const int l = rng.uniform_int(3, 7);
    const WeightedGraph g = random_euclidean_graph(l, rng.next_u64());
    const int k = rng.uniform_int(1, 3);
    Arrangement truth(k);
    std::vector<double> probs(static_cast<std::size_t>(k) * l, 0.0);
    const NodeId start = rng.uniform_int(0, l - 1);
    for (int o = 0; o < k; ++o) {
      NodeId n;
      do {
        n = rng.uniform_int(0, l - 1);
      } while (n == start);
      truth[o] = n;
      probs[static_cast<std::size_t>(o) * l + n] = 1.0;
    }
    const BeliefState belief{PriorModel(k, l, std::move(probs))};
    const auto plan = offline_optimal_plan(g, truth, start);
    REQUIRE_FALSE(plan.empty());
    CHECK(exhaustive_bayes_next(g, belief, start) == plan.front());
  }
}

TEST_CASE("exhaustive search refuses oversized candidate sets") {
  const PriorModel wide = PriorModel::uniform(1, 12);
  const BeliefState belief{wide};
  const WeightedGraph g = random_euclidean_graph(12, 3);
  CHECK_THROWS_AS(exhaustive_bayes_next(g, belief, 0), InfeasibleError);
  ExhaustiveOptions relaxed;
  relaxed.max_candidates = 11;
  CHECK_NOTHROW(exhaustive_bayes_next(g, belief, 0, relaxed));
}

TEST_CASE("exhaustive first move comes from the best permutation") {
  // re-enumerate every permutation with compute_cost and the posterior
  // worlds; the planner's move must equal the first node of the
  // lexicographically smallest expected-cost minimizer
  Rng rng(808);
  for (int trial = 0; trial < 25; ++trial) {
    const int l = rng.uniform_int(3, 6);
    const WeightedGraph g = random_euclidean_graph(l, rng.next_u64());
    const PriorModel prior = test::random_prior(rng.uniform_int(1, 3), l, rng);
    BeliefState belief{prior};
    const NodeId current = rng.uniform_int(0, l - 1);
    std::vector<ObjectId> at_current;
    for (ObjectId o = 0; o < prior.object_count(); ++o)
      if (belief.posterior(o, current) == 1.0) at_current.push_back(o);
    belief.update_on_visit(current, at_current);  // plant the usual zero at current
    if (belief.all_found()) continue;

    std::vector<NodeId> candidates;
    for (NodeId n = 0; n < l; ++n) {
      if (n == current) continue;
      for (ObjectId o = 0; o < prior.object_count(); ++o)
        if (!belief.found(o) && belief.posterior(o, n) > 0.0) {
          candidates.push_back(n);
          break;
        }
    }
    const auto worlds = enumerate_posterior_arrangements(belief);

    std::vector<NodeId> perm = candidates;
    std::vector<NodeId> best_perm;
    double best = std::numeric_limits<double>::infinity();
    do {
      double expected = 0.0;
      for (std::size_t w = 0; w < worlds.size(); ++w)
        expected += worlds.probabilities[w] *
                    compute_cost(g, perm, current, worlds.nodes[w]);
      if (expected < best) {
        best = expected;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    CHECK(exhaustive_bayes_next(g, belief, current) == best_perm.front());
  }
}

TEST_CASE("salesman plan covers exactly the positive-mass nodes") {
  SUBCASE("single mass node gives a one-hop plan") {
    const PriorModel prior(1, 3, {0.0, 0.0, 1.0});
    CHECK(salesman_plan(triangle_graph(), prior, 0) == std::vector<NodeId>{2});
  }
  SUBCASE("zero-mass nodes never appear") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
      const int l = rng.uniform_int(3, 9);
      const WeightedGraph g = random_euclidean_graph(l, rng.next_u64());
      const PriorModel prior = test::random_prior(2, l, rng);
      const NodeId start = rng.uniform_int(0, l - 1);
      for (NodeId n : salesman_plan(g, prior, start)) {
        CHECK(n != start);
        bool has_mass = false;
        for (ObjectId o = 0; o < prior.object_count(); ++o)
          if (prior.prob(o, n) > 0.0) has_mass = true;
        CHECK(has_mass);
      }
    }
  }
  SUBCASE("plan cost equals the permutation-oracle minimum") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      const int l = rng.uniform_int(3, 9);
      const WeightedGraph g = random_euclidean_graph(l, rng.next_u64());
      const PriorModel prior = test::random_prior(3, l, rng);
      const NodeId start = rng.uniform_int(0, l - 1);
      const auto plan = salesman_plan(g, prior, start);
      double plan_cost = 0.0;
      NodeId at = start;
      for (NodeId n : plan) {
        plan_cost += g.cost(at, n);
        at = n;
      }
      CHECK(plan_cost ==
            doctest::Approx(test::brute_force_path_cost(g, start, plan)).epsilon(1e-12));
    }
  }
}

TEST_CASE("offline optimal plan visits the distinct truth nodes") {
  SUBCASE("everything at the start leaves nothing to do") {
    CHECK(offline_optimal_plan(triangle_graph(), {0, 0, 0}, 0).empty());
  }
  SUBCASE("a single location is a direct hop") {
    CHECK(offline_optimal_plan(triangle_graph(), {2}, 0) == std::vector<NodeId>{2});
  }
  SUBCASE("four objects on three distinct nodes match the oracle") {
    Rng rng(29);
    for (int trial = 0; trial < 40; ++trial) {
      const WeightedGraph g = random_euclidean_graph(6, rng.next_u64());
      Arrangement truth = {1, 4, 1, 5};
      const auto plan = offline_optimal_plan(g, truth, 0);
      CHECK(plan.size() == 3);
      double plan_cost = 0.0;
      NodeId at = 0;
      for (NodeId n : plan) {
        plan_cost += g.cost(at, n);
        at = n;
      }
      CHECK(plan_cost ==
            doctest::Approx(test::brute_force_path_cost(g, 0, {1, 4, 5})).epsilon(1e-12));
    }
  }
}

TEST_CASE("online planners never see the arrangement") {
  // same environment, two different truths kept away from the start node:
  // the first decision, made before any distinguishing observation, must
  // be identical
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Environment env = generate_environment(6, 3, 111, trial);
    Arrangement a, b;
    Rng sampler(rng.next_u64());
    for (int tries = 0; tries < 200; ++tries) {
      const Arrangement x = sample_arrangement(env.prior, sampler);
      if (std::find(x.begin(), x.end(), env.start) != x.end()) continue;
      if (a.empty()) {
        a = x;
      } else if (x != a) {
        b = x;
        break;
      }
    }
    if (b.empty()) continue;  // this prior nearly always pins the truth

    for (PlannerKind kind :
         {PlannerKind::Proximity, PlannerKind::Probability, PlannerKind::ProbProx,
          PlannerKind::ExhaustiveBayes, PlannerKind::Salesman}) {
      auto first_move = [&](const Arrangement& truth) {
        HuntInstance instance{env.graph, env.prior, truth, env.start};
        auto planner = make_online_planner(kind);
        const HuntOutcome outcome = run_hunt(instance, *planner, 200);
        REQUIRE(outcome.trajectory.steps.size() >= 2);
        return outcome.trajectory.steps[1].node;
      };
      CHECK(first_move(a) == first_move(b));
    }
  }
}

TEST_CASE("boosting the chosen node's mass keeps it chosen") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int l = rng.uniform_int(3, 8);
    const WeightedGraph g = random_euclidean_graph(l, rng.next_u64());
    const int k = rng.uniform_int(1, 3);
    const PriorModel prior = test::random_prior(k, l, rng);
    const NodeId current = rng.uniform_int(0, l - 1);
    const BeliefState belief{prior};

    for (const bool use_probability : {true, false}) {
      const NodeId chosen = use_probability ? probability_next(g, belief, current)
                                            : prob_prox_next(g, belief, current);
      // blend one object's row toward a point mass at the chosen node
      const ObjectId o = rng.uniform_int(0, k - 1);
      const double t = rng.uniform(0.05, 0.95);
      std::vector<double> probs(prior.flat().begin(), prior.flat().end());
      for (NodeId n = 0; n < l; ++n) {
        double& cell = probs[static_cast<std::size_t>(o) * l + n];
        cell = (1.0 - t) * cell + (n == chosen ? t : 0.0);
      }
      const BeliefState boosted{PriorModel(k, l, std::move(probs))};
      const NodeId rechosen = use_probability
                                  ? probability_next(g, boosted, current)
                                  : prob_prox_next(g, boosted, current);
      CHECK(rechosen == chosen);
    }
  }
}

TEST_CASE("no classic planner ever beats the clairvoyant bound") {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const Environment env = generate_environment(rng.uniform_int(3, 7), 4, 271, trial);
    const HuntInstance instance{env.graph, env.prior,
                                sample_arrangement(env.prior, rng.next_u64()), env.start};
    auto offline = make_offline_planner(instance.truth);
    const double bound =
        run_hunt(instance, *offline, default_step_limit(instance)).trajectory.total_cost;
    for (PlannerKind kind :
         {PlannerKind::Proximity, PlannerKind::Probability, PlannerKind::ProbProx,
          PlannerKind::ExhaustiveBayes, PlannerKind::Salesman}) {
      auto planner = make_online_planner(kind);
      const HuntOutcome outcome =
          run_hunt(instance, *planner, default_step_limit(instance));
      REQUIRE(outcome.completed);
      CHECK(outcome.trajectory.total_cost >= bound - 1e-9);
    }
  }
}
