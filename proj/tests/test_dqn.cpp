#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "scav/bench.hpp"
#include "scav/dqn.hpp"

using namespace scav;

namespace {

QNetwork small_random_net(int l, std::uint64_t seed) {
  return QNetwork::random_init(2 * l, l, seed);
}

Transition random_transition(int l, Rng& rng, bool terminal) {
  Transition t;
  t.obs.resize(2 * l);
  t.next_obs.resize(2 * l);
  for (auto& x : t.obs) x = rng.uniform(0.0, 1.0);
  for (auto& x : t.next_obs) x = rng.uniform(0.0, 1.0);
  t.action = rng.uniform_int(0, l - 1);
  t.reward = rng.uniform(-1.0, 0.0);
  t.next_current = rng.uniform_int(0, l - 1);
  t.terminal = terminal;
  return t;
}

}  // namespace

TEST_CASE("observation layout") {
  const Environment env = generate_environment(8, 4, 7, 0);
  const BeliefState belief{env.prior};
  const double scale = env.graph.max_cost();

  SUBCASE("map variant is 2l long with one zero cost at the current node") {
    const auto obs = build_observation(env.graph, belief, 3, true, scale);
    REQUIRE(obs.size() == 16);
    int zeros = 0;
    for (int n = 0; n < 8; ++n) {
      CHECK(obs[n] >= 0.0);
      CHECK(obs[n] <= 1.0);
      CHECK(obs[8 + n] <= 1.0);  // normalized costs
      if (obs[8 + n] == 0.0) ++zeros;
    }
    CHECK(zeros == 1);
    CHECK(obs[8 + 3] == 0.0);
  }
  SUBCASE("mapless variant one-hot encodes the current node") {
    const auto obs = build_observation(env.graph, belief, 5, false);
    REQUIRE(obs.size() == 16);
    for (int n = 0; n < 8; ++n) CHECK(obs[8 + n] == (n == 5 ? 1.0 : 0.0));
  }
  SUBCASE("all objects found zeroes the probability half") {
    BeliefState done{env.prior};
    Arrangement truth = sample_arrangement(env.prior, 3);
    for (NodeId n = 0; n < 8; ++n) {
      std::vector<ObjectId> present;
      for (ObjectId o = 0; o < 4; ++o)
        if (truth[o] == n && !done.found(o)) present.push_back(o);
      done.update_on_visit(n, present);
    }
    REQUIRE(done.all_found());
    const auto obs = build_observation(env.graph, done, 0, true, scale);
    for (int n = 0; n < 8; ++n) CHECK(obs[n] == 0.0);
  }
}

TEST_CASE("forward pass") {
  SUBCASE("zero network maps everything to zero") {
    QNetwork net(6, 3);
    const std::vector<double> input(6, 0.37);
    for (double q : net.forward(input)) CHECK(q == 0.0);
  }
  SUBCASE("hand-set single path computes the hand value") {
    // one active unit per layer: q[1] = w3 * relu(w2 * relu(w1*x0 + b1) + b2) + b3
    QNetwork net(2, 2, 4);
    auto& layers = net.layers();
    layers[0].w[0 * 2 + 0] = 0.5;   // unit 0 reads input 0
    layers[0].b[0] = 0.25;
    layers[1].w[0 * 4 + 0] = -2.0;  // unit 0 reads hidden-1 unit 0
    layers[1].b[0] = 3.0;
    layers[2].w[1 * 4 + 0] = 10.0;  // output 1 reads hidden-2 unit 0
    layers[2].b[1] = 1.0;
    const std::vector<double> input = {2.0, -9.0};
    // h1 = relu(0.5*2 + 0.25) = 1.25; h2 = relu(-2*1.25 + 3) = 0.5;
    // q = (0, 10*0.5 + 1) = (0, 6)
    const auto q = net.forward(input);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 6.0);
  }
  SUBCASE("outputs move no faster than the layer-norm product") {
    Rng rng(99);
    const QNetwork net = small_random_net(4, 17);
    double lipschitz = 1.0;
    for (const auto& layer : net.layers()) {
      double max_row = 0.0;
      for (int r = 0; r < layer.out; ++r) {
        double row = 0.0;
        for (int c = 0; c < layer.in; ++c)
          row += std::abs(layer.w[static_cast<std::size_t>(r) * layer.in + c]);
        max_row = std::max(max_row, row);
      }
      lipschitz *= max_row;
    }
    std::vector<double> input(8);
    for (auto& x : input) x = rng.uniform(0.0, 1.0);
    const auto base = net.forward(input);
    for (int i = 0; i < 8; ++i) {
      auto bumped = input;
      bumped[i] += 1e-7;
      const auto moved = net.forward(bumped);
      for (int o = 0; o < 4; ++o)
        CHECK(std::abs(moved[o] - base[o]) <= lipschitz * 1e-7 + 1e-15);
    }
  }
}

TEST_CASE("td loss on matched terminal transitions is exactly zero") {
  QNetwork net(4, 2);
  net.layers()[2].b = {-2.0, -2.0};  // Q == reward for every action
  const QNetwork target = net;
  std::vector<Transition> transitions(3);
  std::vector<const Transition*> batch;
  for (auto& t : transitions) {
    t.obs.assign(4, 0.5);
    t.next_obs.assign(4, 0.5);
    t.action = 1;
    t.reward = -2.0;
    t.terminal = true;
    batch.push_back(&t);
  }
  const auto result = td_loss_and_gradients(net, target, batch, 0.95);
  CHECK(result.loss == 0.0);
  for (double g : result.grad) CHECK(g == 0.0);
}

TEST_CASE("duplicating the batch leaves loss and gradients unchanged") {
  Rng rng(7);
  const QNetwork net = small_random_net(3, 21);
  const QNetwork target = small_random_net(3, 22);
  std::vector<Transition> transitions;
  for (int i = 0; i < 5; ++i) transitions.push_back(random_transition(3, rng, i % 2 == 0));
  std::vector<const Transition*> batch, doubled;
  for (const auto& t : transitions) batch.push_back(&t);
  doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());

  const auto a = td_loss_and_gradients(net, target, batch, 0.95);
  const auto b = td_loss_and_gradients(net, target, doubled, 0.95);
  CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
  REQUIRE(a.grad.size() == b.grad.size());
  for (std::size_t i = 0; i < a.grad.size(); ++i)
    CHECK(a.grad[i] == doctest::Approx(b.grad[i]).epsilon(1e-9));
}

TEST_CASE("backprop matches central finite differences") {
  Rng rng(1234);
  int checked_pairs = 0;
  for (int pair = 0; pair < 50; ++pair) {
    const int l = rng.uniform_int(2, 4);
    QNetwork net = small_random_net(l, rng.next_u64());
    const QNetwork target = small_random_net(l, rng.next_u64());
    std::vector<Transition> transitions;
    for (int i = 0; i < 6; ++i)
      transitions.push_back(random_transition(l, rng, rng.uniform01() < 0.3));
    std::vector<const Transition*> batch;
    for (const auto& t : transitions) batch.push_back(&t);
    const double gamma = 0.95;

    const auto analytic = td_loss_and_gradients(net, target, batch, gamma);

    auto loss_at = [&](const std::vector<double>& flat) {
      QNetwork probe = net;
      set_parameters(probe, flat);
      return td_loss_and_gradients(probe, target, batch, gamma).loss;
    };

    const std::vector<double> flat = parameters(net);
    const double h = 1e-5;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      auto up = flat, down = flat;
      up[i] += h;
      down[i] -= h;
      const double fd = (loss_at(up) - loss_at(down)) / (2.0 * h);
      const double bp = analytic.grad[i];
      const double denom = std::max({std::abs(fd), std::abs(bp), 1e-6});
      CHECK(std::abs(fd - bp) / denom < 1e-4);
    }
    ++checked_pairs;
  }
  CHECK(checked_pairs == 50);
}

TEST_CASE("adam steps") {
  SUBCASE("zero gradient leaves parameters untouched") {
    std::vector<double> params = {1.0, -2.0, 3.0};
    const std::vector<double> grad(3, 0.0);
    AdamState state(3);
    adam_step(params, grad, state, 0.05);
    CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
  }
  SUBCASE("zero learning rate leaves parameters untouched") {
    std::vector<double> params = {1.0, -2.0};
    const std::vector<double> grad = {0.3, -0.7};
    AdamState state(2);
    adam_step(params, grad, state, 0.0);
    CHECK(params == std::vector<double>{1.0, -2.0});
  }
  SUBCASE("the first step moves by roughly lr in the gradient direction") {
    std::vector<double> params = {0.0, 0.0, 0.0};
    const std::vector<double> grad = {0.9, -0.04, 2.5};
    AdamState state(3);
    adam_step(params, grad, state, 0.05);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double expected = -0.05 * grad[i] / (std::abs(grad[i]) + 1e-8);
      CHECK(params[i] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("replay buffer evicts strictly in fifo order") {
  ReplayBuffer buffer(5);
  CHECK(buffer.capacity() == 5);
  for (int i = 0; i < 8; ++i) {
    Transition t;
    t.reward = i;
    buffer.push(std::move(t));
  }
  REQUIRE(buffer.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(buffer.at(i).reward == 3 + i);

  SUBCASE("default capacity holds exactly the last 20000") {
    ReplayBuffer big;
    CHECK(big.capacity() == 20000);
    for (int i = 0; i < 20005; ++i) {
      Transition t;
      t.reward = i;
      big.push(std::move(t));
    }
    CHECK(big.size() == 20000);
    CHECK(big.at(0).reward == 5);
    CHECK(big.at(19999).reward == 20004);
  }
}

TEST_CASE("schedules follow their closed forms for fifty epochs") {
  const TrainConfig config;
  for (int e = 0; e <= 50; ++e) {
    CHECK(lr_at(config, e) == 0.05 * std::max(0.0, 1.0 - e / 40.0));
    CHECK(epsilon_at(config, e) == std::max(0.02, 1.0 - 0.1 * e));
  }
  CHECK(epsilon_at(config, 10) == 0.02);
  CHECK(lr_at(config, 40) == 0.0);
}

TEST_CASE("greedy action selection masks the current node") {
  const WeightedGraph g = random_euclidean_graph(4, 2);
  const PriorModel prior = PriorModel::uniform(1, 4);
  const BeliefState belief{prior};

  SUBCASE("a dominant output wins") {
    QNetwork net(8, 4);
    net.layers()[2].b = {0.0, 0.0, 9.0, 0.0};
    CHECK(dqn_next(net, g, belief, 0, true) == 2);
  }
  SUBCASE("the current node is skipped even with the highest q") {
    QNetwork net(8, 4);
    net.layers()[2].b = {9.0, 1.0, 5.0, 1.0};
    CHECK(dqn_next(net, g, belief, 0, true) == 2);
  }
  SUBCASE("uniform zero network falls back to the lowest index") {
    QNetwork net(8, 4);
    CHECK(dqn_next(net, g, belief, 2, true) == 0);
    CHECK(dqn_next(net, g, belief, 0, true) == 1);
  }
}

TEST_CASE("training is bit-reproducible given a seed") {
  const Environment env = generate_environment(4, 2, 99, 1);
  TrainConfig config;
  config.epochs = 2;
  config.steps_per_epoch = 80;
  config.test_episodes = 5;
  config.batch_size = 8;
  config.hidden = 8;
  config.replay_capacity = 256;
  config.seed = 31415;

  const TrainResult a = train_dqn(env.graph, env.prior, env.start, config);
  const TrainResult b = train_dqn(env.graph, env.prior, env.start, config);
  CHECK(parameters(a.best.net) == parameters(b.best.net));
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i)
    CHECK(a.curve[i].mean_test_return == b.curve[i].mean_test_return);
}

TEST_CASE("a forced single-candidate hunt is solved from epoch one") {
  // two nodes, the object always at node 1: the only legal move is optimal
  const WeightedGraph g(2, {0, 7, 7, 0});
  const PriorModel prior(1, 2, {0.0, 1.0});
  TrainConfig config;
  config.epochs = 2;
  config.steps_per_epoch = 40;
  config.test_episodes = 10;
  config.batch_size = 4;
  config.hidden = 4;
  config.seed = 5;
  const TrainResult result = train_dqn(g, prior, 0, config);
  REQUIRE(result.curve.size() == 2);
  CHECK(result.curve[0].mean_test_return == -7.0);
  CHECK(result.best_return == -7.0);
}

TEST_CASE("reported test return equals the negated hunt cost of the policy") {
  const Environment env = generate_environment(4, 2, 12, 3);
  TrainConfig config;
  config.epochs = 1;
  config.steps_per_epoch = 60;
  config.test_episodes = 7;
  config.batch_size = 8;
  config.hidden = 8;
  config.seed = 77;
  config.normalize = false;  // raw rewards, raw returns
  const TrainResult result = train_dqn(env.graph, env.prior, env.start, config);

  // replay the evaluation stream by hand
  Rng eval_rng(derive_seed({config.seed, 3, 0}));
  auto planner = make_dqn_planner(PlannerKind::DqnMap, result.best);
  double total = 0.0;
  const int cap = config.step_limit_factor * 4 * 2;
  for (int e = 0; e < config.test_episodes; ++e) {
    HuntInstance instance{env.graph, env.prior, sample_arrangement(env.prior, eval_rng),
                          env.start};
    total -= run_hunt(instance, *planner, cap).trajectory.total_cost;
  }
  CHECK(result.curve[0].mean_test_return ==
        doctest::Approx(total / config.test_episodes).epsilon(1e-12));
}

TEST_CASE("policy files round-trip bit-exactly") {
  const Environment env = generate_environment(5, 3, 5, 5);
  DqnPolicy policy;
  policy.net = QNetwork::random_init(10, 5, 424242);
  policy.with_map = false;
  policy.cost_scale = env.graph.max_cost();

  const auto path = std::filesystem::temp_directory_path() / "scav_test_policy.bin";
  save_policy(policy, path.string());
  const DqnPolicy loaded = load_policy(path.string());
  std::filesystem::remove(path);

  CHECK(loaded.with_map == policy.with_map);
  CHECK(loaded.cost_scale == policy.cost_scale);
  CHECK(parameters(loaded.net) == parameters(policy.net));

  CHECK_THROWS_AS(make_dqn_planner(PlannerKind::DqnMap, loaded), std::invalid_argument);
  CHECK_NOTHROW(make_dqn_planner(PlannerKind::Dqn, loaded));
}

TEST_CASE("curve csv has the documented header and rows") {
  std::vector<EpochStats> curve = {{0, -3.5, 1.0, 0.05}, {1, -2.25, 0.9, 0.04875}};
  std::ostringstream out;
  write_curve_csv(curve, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,mean_test_return,epsilon,lr");
  std::getline(in, line);
  CHECK(line == "0,-3.5,1,0.05");
}
