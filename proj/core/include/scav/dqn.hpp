#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scav/hunt.hpp"
#include "scav/planners.hpp"
#include "scav/rng.hpp"

namespace scav {

/// Flat observation of length 2l: per-node probability of finding at least
/// one unfound object, followed by travel costs from the current node
/// (map variant) or a one-hot current-node marker (mapless variant).
/// Cost entries are divided by cost_scale (1.0 = no normalization).
std::vector<double> build_observation(const WeightedGraph& graph,
                                      const BeliefState& belief, NodeId current,
                                      bool with_map, double cost_scale = 1.0);

struct LinearLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out*in, row-major
  std::vector<double> b;  // out
};

/// 2l -> 16 -> 16 -> l multi-layer perceptron, ReLU after each hidden
/// layer, linear output of per-action Q-values.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(int input_size, int output_size, int hidden = 16);

  /// Fan-in-scaled uniform weights, zero biases, deterministic given seed.
  static QNetwork random_init(int input_size, int output_size,
                              std::uint64_t seed, int hidden = 16);

  std::vector<double> forward(std::span<const double> input) const;

  int input_size() const { return layers_[0].in; }
  int output_size() const { return layers_[2].out; }

  std::array<LinearLayer, 3>& layers() { return layers_; }
  const std::array<LinearLayer, 3>& layers() const { return layers_; }
  std::size_t parameter_count() const;

 private:
  std::array<LinearLayer, 3> layers_;
};

/// Flat parameter vector in canonical order (w then b, layer by layer).
std::vector<double> parameters(const QNetwork& net);
void set_parameters(QNetwork& net, std::span<const double> flat);

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  NodeId next_current = 0;  // masked out of the bootstrap max
  bool terminal = false;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 20000);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  /// i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  /// Uniform sample with replacement.
  std::vector<const Transition*> sample(int batch_size, Rng& rng) const;

 private:
  std::vector<Transition> ring_;
  std::size_t capacity_ = 0;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

struct TdBatchResult {
  double loss = 0.0;
  std::vector<double> grad;  // canonical flat order
};

/// Mean-squared one-step TD error over the batch; targets come from the
/// separate target network with the next state's current node masked out
/// of the max. Gradients by exact backpropagation.
TdBatchResult td_loss_and_gradients(const QNetwork& net, const QNetwork& target,
                                    std::span<const Transition* const> batch,
                                    double gamma);

struct AdamState {
  explicit AdamState(std::size_t n, double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);
  std::vector<double> m, v;
  long step = 0;
  double beta1, beta2, epsilon;
};

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, double lr);

struct TrainConfig {
  int epochs = 40;
  int steps_per_epoch = 2000;
  int batch_size = 64;
  int test_episodes = 200;
  double gamma = 0.95;
  double lr_start = 0.05;
  int lr_zero_epoch = 40;  // lr reaches 0 here
  double epsilon_start = 1.0;
  double epsilon_decay_per_epoch = 0.1;
  double epsilon_floor = 0.02;
  std::size_t replay_capacity = 20000;
  int target_sync_interval = 1000;  // optimizer steps between target syncs
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int hidden = 16;
  int step_limit_factor = 4;  // episode cap = factor*l*k, truncation bootstraps
  bool with_map = true;
  bool normalize = true;  // divide observation costs and rewards by max cost
  std::uint64_t seed = 0;
};

double lr_at(const TrainConfig& config, int epoch);
double epsilon_at(const TrainConfig& config, int epoch);

struct EpochStats {
  int epoch = 0;
  double mean_test_return = 0.0;  // raw units: -(mean hunt cost)
  double epsilon = 0.0;
  double lr = 0.0;
};

/// Trained policy plus everything needed to rebuild its observations.
struct DqnPolicy {
  QNetwork net;
  bool with_map = true;
  double cost_scale = 1.0;
};

struct TrainResult {
  DqnPolicy best;
  std::vector<EpochStats> curve;
  int best_epoch = -1;
  double best_return = 0.0;
};

/// Trains on one environment: epsilon-greedy rollouts, replay sampling,
/// one Adam update per environment step, greedy evaluation after each
/// epoch. Returns the network with the best test mean return.
/// Single-threaded and bit-reproducible given config.seed.
TrainResult train_dqn(const WeightedGraph& graph, const PriorModel& prior,
                      NodeId start, const TrainConfig& config);

/// Greedy argmax over Q-values with the current node masked out, ties by
/// lowest node index.
NodeId dqn_next(const QNetwork& net, const WeightedGraph& graph,
                const BeliefState& belief, NodeId current, bool with_map,
                double cost_scale = 1.0);

/// Planner adapter around a trained (or arbitrary) policy.
/// `kind` must be Dqn or DqnMap and must agree with policy.with_map.
std::unique_ptr<Planner> make_dqn_planner(PlannerKind kind, DqnPolicy policy);

void save_policy(const DqnPolicy& policy, const std::string& path);
DqnPolicy load_policy(const std::string& path);

/// `epoch,mean_test_return,epsilon,lr` rows.
void write_curve_csv(std::span<const EpochStats> curve, std::ostream& out);

}  // namespace scav
