#include "scav/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "scav/errors.hpp"

namespace scav {

std::vector<double> build_observation(const WeightedGraph& graph,
                                      const BeliefState& belief, NodeId current,
                                      bool with_map, double cost_scale) {
  const int l = graph.node_count();
  if (current < 0 || current >= l)
    throw std::invalid_argument("build_observation: current node out of range");
  if (!(cost_scale > 0.0))
    throw std::invalid_argument("build_observation: cost_scale must be positive");

  std::vector<double> obs(2 * static_cast<std::size_t>(l), 0.0);
  for (NodeId n = 0; n < l; ++n) obs[n] = belief.prob_any_unfound(n);
  if (with_map) {
    for (NodeId n = 0; n < l; ++n) obs[l + n] = graph.cost(n, current) / cost_scale;
  } else {
    obs[l + current] = 1.0;
  }
  return obs;
}

QNetwork::QNetwork(int input_size, int output_size, int hidden) {
  if (input_size < 1 || output_size < 1 || hidden < 1)
    throw std::invalid_argument("QNetwork: sizes must be positive");
  layers_[0] = {input_size, hidden,
                std::vector<double>(static_cast<std::size_t>(hidden) * input_size, 0.0),
                std::vector<double>(hidden, 0.0)};
  layers_[1] = {hidden, hidden,
                std::vector<double>(static_cast<std::size_t>(hidden) * hidden, 0.0),
                std::vector<double>(hidden, 0.0)};
  layers_[2] = {hidden, output_size,
                std::vector<double>(static_cast<std::size_t>(output_size) * hidden, 0.0),
                std::vector<double>(output_size, 0.0)};
}

QNetwork QNetwork::random_init(int input_size, int output_size, std::uint64_t seed,
                               int hidden) {
  QNetwork net(input_size, output_size, hidden);
  Rng rng(seed);
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / layer.in);
    for (auto& w : layer.w) w = rng.uniform(-limit, limit);
  }
  return net;
}

namespace {

void affine(const LinearLayer& layer, std::span<const double> x,
            std::vector<double>& out) {
  out.assign(layer.b.begin(), layer.b.end());
  for (int r = 0; r < layer.out; ++r) {
    const double* wr = layer.w.data() + static_cast<std::size_t>(r) * layer.in;
    double acc = 0.0;
    for (int c = 0; c < layer.in; ++c) acc += wr[c] * x[c];
    out[r] += acc;
  }
}

void relu_inplace(std::vector<double>& v) {
  for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size())
    throw std::invalid_argument("QNetwork::forward: input size mismatch");
  std::vector<double> h1, h2, q;
  affine(layers_[0], input, h1);
  relu_inplace(h1);
  affine(layers_[1], h1, h2);
  relu_inplace(h2);
  affine(layers_[2], h2, q);
  return q;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.w.size() + layer.b.size();
  return n;
}

std::vector<double> parameters(const QNetwork& net) {
  std::vector<double> flat;
  flat.reserve(net.parameter_count());
  for (const auto& layer : net.layers()) {
    flat.insert(flat.end(), layer.w.begin(), layer.w.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

void set_parameters(QNetwork& net, std::span<const double> flat) {
  if (flat.size() != net.parameter_count())
    throw std::invalid_argument("set_parameters: size mismatch");
  std::size_t at = 0;
  for (auto& layer : net.layers()) {
    std::copy_n(flat.begin() + at, layer.w.size(), layer.w.begin());
    at += layer.w.size();
    std::copy_n(flat.begin() + at, layer.b.size(), layer.b.begin());
    at += layer.b.size();
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  ring_.resize(capacity_);
}

void ReplayBuffer::push(Transition t) {
  ring_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return ring_[(oldest + i) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::vector<const Transition*> batch(batch_size);
  for (auto& slot : batch)
    slot = &at(static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(size_) - 1)));
  return batch;
}

namespace {

/// Forward pass that keeps pre-activations for backprop.
struct ForwardTrace {
  std::vector<double> h1, h2, q;  // post-activation / output
};

ForwardTrace traced_forward(const QNetwork& net, std::span<const double> x) {
  ForwardTrace t;
  affine(net.layers()[0], x, t.h1);
  relu_inplace(t.h1);
  affine(net.layers()[1], t.h1, t.h2);
  relu_inplace(t.h2);
  affine(net.layers()[2], t.h2, t.q);
  return t;
}

double masked_max(std::span<const double> q, int masked_index) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(q.size()); ++i) {
    if (i == masked_index) continue;
    if (q[i] > best) best = q[i];
  }
  return best;
}

struct GradAccumulator {
  explicit GradAccumulator(const QNetwork& net) {
    for (const auto& layer : net.layers()) {
      w.emplace_back(layer.w.size(), 0.0);
      b.emplace_back(layer.b.size(), 0.0);
    }
  }
  std::vector<std::vector<double>> w, b;

  std::vector<double> flatten() const {
    std::vector<double> flat;
    for (std::size_t i = 0; i < w.size(); ++i) {
      flat.insert(flat.end(), w[i].begin(), w[i].end());
      flat.insert(flat.end(), b[i].begin(), b[i].end());
    }
    return flat;
  }
};

}  // namespace

TdBatchResult td_loss_and_gradients(const QNetwork& net, const QNetwork& target,
                                    std::span<const Transition* const> batch,
                                    double gamma) {
  if (batch.empty())
    throw std::invalid_argument("td_loss_and_gradients: batch must be non-empty");

  const auto& layers = net.layers();
  GradAccumulator grads(net);
  double loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (const Transition* tr : batch) {
    const ForwardTrace trace = traced_forward(net, tr->obs);
    double y = tr->reward;
    if (!tr->terminal) {
      const std::vector<double> qn = target.forward(tr->next_obs);
      y += gamma * masked_max(qn, tr->next_current);
    }
    const double err = trace.q[tr->action] - y;
    loss += err * err * inv_batch;

    // d(loss)/d(q[a]) for the mean-squared loss
    const double dq = 2.0 * err * inv_batch;

    // output layer: grad w3[a] += dq * h2, grad b3[a] += dq
    {
      const auto& l3 = layers[2];
      double* gw = grads.w[2].data() + static_cast<std::size_t>(tr->action) * l3.in;
      for (int c = 0; c < l3.in; ++c) gw[c] += dq * trace.h2[c];
      grads.b[2][tr->action] += dq;
    }

    // hidden 2
    const auto& l2 = layers[1];
    const auto& l3 = layers[2];
    std::vector<double> dz2(l2.out, 0.0);
    {
      const double* w3a = l3.w.data() + static_cast<std::size_t>(tr->action) * l3.in;
      for (int c = 0; c < l3.in; ++c)
        dz2[c] = trace.h2[c] > 0.0 ? dq * w3a[c] : 0.0;
    }
    for (int r = 0; r < l2.out; ++r) {
      if (dz2[r] == 0.0) continue;
      double* gw = grads.w[1].data() + static_cast<std::size_t>(r) * l2.in;
      for (int c = 0; c < l2.in; ++c) gw[c] += dz2[r] * trace.h1[c];
      grads.b[1][r] += dz2[r];
    }

    // hidden 1
    const auto& l1 = layers[0];
    std::vector<double> dz1(l1.out, 0.0);
    for (int r = 0; r < l2.out; ++r) {
      if (dz2[r] == 0.0) continue;
      const double* w2r = l2.w.data() + static_cast<std::size_t>(r) * l2.in;
      for (int c = 0; c < l2.in; ++c) dz1[c] += dz2[r] * w2r[c];
    }
    for (int r = 0; r < l1.out; ++r) {
      if (trace.h1[r] <= 0.0) dz1[r] = 0.0;
      if (dz1[r] == 0.0) continue;
      double* gw = grads.w[0].data() + static_cast<std::size_t>(r) * l1.in;
      for (int c = 0; c < l1.in; ++c) gw[c] += dz1[r] * tr->obs[c];
      grads.b[0][r] += dz1[r];
    }
  }

  return {loss, grads.flatten()};
}

AdamState::AdamState(std::size_t n, double beta1_, double beta2_, double epsilon_)
    : m(n, 0.0), v(n, 0.0), beta1(beta1_), beta2(beta2_), epsilon(epsilon_) {}

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, double lr) {
  if (params.size() != grad.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

double lr_at(const TrainConfig& config, int epoch) {
  const double frac = 1.0 - static_cast<double>(epoch) / config.lr_zero_epoch;
  return config.lr_start * std::max(0.0, frac);
}

double epsilon_at(const TrainConfig& config, int epoch) {
  return std::max(config.epsilon_floor,
                  config.epsilon_start - config.epsilon_decay_per_epoch * epoch);
}

NodeId dqn_next(const QNetwork& net, const WeightedGraph& graph,
                const BeliefState& belief, NodeId current, bool with_map,
                double cost_scale) {
  const std::vector<double> obs =
      build_observation(graph, belief, current, with_map, cost_scale);
  const std::vector<double> q = net.forward(obs);
  NodeId best = -1;
  for (NodeId n = 0; n < graph.node_count(); ++n) {
    if (n == current) continue;
    if (best < 0 || q[n] > q[best]) best = n;
  }
  if (best < 0) throw InconsistencyError("dqn_next: no selectable node");
  return best;
}

namespace {

class DqnPlanner final : public Planner {
 public:
  DqnPlanner(PlannerKind kind, DqnPolicy policy)
      : kind_(kind), policy_(std::move(policy)) {}
  std::string_view name() const override { return to_string(kind_); }
  NodeId next(const WeightedGraph& g, const BeliefState& b, NodeId c) override {
    return dqn_next(policy_.net, g, b, c, policy_.with_map, policy_.cost_scale);
  }

 private:
  PlannerKind kind_;
  DqnPolicy policy_;
};

double evaluate_greedy(const DqnPolicy& policy, const WeightedGraph& graph,
                       const PriorModel& prior, NodeId start, int episodes,
                       int step_limit, Rng& rng) {
  DqnPlanner planner(policy.with_map ? PlannerKind::DqnMap : PlannerKind::Dqn,
                     policy);
  double total_return = 0.0;
  for (int e = 0; e < episodes; ++e) {
    HuntInstance instance{graph, prior, sample_arrangement(prior, rng), start};
    const HuntOutcome outcome = run_hunt(instance, planner, step_limit);
    total_return -= outcome.trajectory.total_cost;
  }
  return total_return / episodes;
}

}  // namespace

TrainResult train_dqn(const WeightedGraph& graph, const PriorModel& prior,
                      NodeId start, const TrainConfig& config) {
  const int l = graph.node_count();
  const int k = prior.object_count();
  if (l < 2) throw std::invalid_argument("train_dqn: need at least two nodes");
  if (start < 0 || start >= l) throw std::invalid_argument("train_dqn: bad start");
  bool learnable = false;
  for (ObjectId o = 0; o < k && !learnable; ++o)
    for (NodeId n = 0; n < l; ++n)
      if (n != start && prior.prob(o, n) > 0.0) {
        learnable = true;
        break;
      }
  if (!learnable)
    throw std::invalid_argument("train_dqn: every object is always at the start node");

  const double cost_scale = config.normalize ? graph.max_cost() : 1.0;
  const int step_cap = config.step_limit_factor * l * k;

  QNetwork net = QNetwork::random_init(2 * l, l, derive_seed({config.seed, 1}),
                                       config.hidden);
  QNetwork target = net;
  ReplayBuffer buffer(config.replay_capacity);
  AdamState adam(net.parameter_count(), config.adam_beta1, config.adam_beta2,
                 config.adam_epsilon);
  Rng behavior(derive_seed({config.seed, 2}));

  // Episode state, persists across epoch boundaries.
  Arrangement truth;
  std::unique_ptr<BeliefState> belief;
  NodeId current = start;
  int episode_steps = 0;
  bool episode_done = true;

  auto reset_episode = [&] {
    do {
      truth = sample_arrangement(prior, behavior);
      belief = std::make_unique<BeliefState>(prior);
      std::vector<ObjectId> present;
      for (ObjectId o = 0; o < k; ++o)
        if (truth[o] == start) present.push_back(o);
      belief->update_on_visit(start, present);
    } while (belief->all_found());  // nothing to decide, draw a fresh hunt
    current = start;
    episode_steps = 0;
    episode_done = false;
  };

  TrainResult result;
  result.best_return = -std::numeric_limits<double>::infinity();
  long opt_steps = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double eps = epsilon_at(config, epoch);
    const double lr = lr_at(config, epoch);

    for (int step = 0; step < config.steps_per_epoch; ++step) {
      if (episode_done) reset_episode();

      std::vector<double> obs =
          build_observation(graph, *belief, current, config.with_map, cost_scale);

      NodeId action;
      if (behavior.uniform01() < eps) {
        const int pick = behavior.uniform_int(0, l - 2);
        action = pick >= current ? pick + 1 : pick;
      } else {
        action = dqn_next(net, graph, *belief, current, config.with_map, cost_scale);
      }

      const double travel = graph.cost(current, action);
      std::vector<ObjectId> present;
      for (ObjectId o = 0; o < k; ++o)
        if (truth[o] == action && !belief->found(o)) present.push_back(o);
      belief->update_on_visit(action, present);
      current = action;
      ++episode_steps;

      const bool terminal = belief->all_found();
      const bool truncated = !terminal && episode_steps >= step_cap;
      episode_done = terminal || truncated;

      Transition tr;
      tr.obs = std::move(obs);
      tr.action = action;
      tr.reward = -travel / cost_scale;
      tr.next_obs =
          build_observation(graph, *belief, current, config.with_map, cost_scale);
      tr.next_current = current;
      tr.terminal = terminal;  // truncation still bootstraps
      buffer.push(std::move(tr));

      if (buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
        const auto batch = buffer.sample(config.batch_size, behavior);
        const TdBatchResult td = td_loss_and_gradients(net, target, batch, config.gamma);
        std::vector<double> flat = parameters(net);
        adam_step(flat, td.grad, adam, lr);
        set_parameters(net, flat);
        ++opt_steps;
        if (opt_steps % config.target_sync_interval == 0) target = net;
      }
    }

    Rng eval_rng(derive_seed({config.seed, 3, static_cast<std::uint64_t>(epoch)}));
    DqnPolicy snapshot{net, config.with_map, cost_scale};
    const double mean_return = evaluate_greedy(snapshot, graph, prior, start,
                                               config.test_episodes, step_cap, eval_rng);
    result.curve.push_back({epoch, mean_return, eps, lr});
    if (mean_return > result.best_return) {
      result.best_return = mean_return;
      result.best_epoch = epoch;
      result.best = std::move(snapshot);
    }
  }

  return result;
}

std::unique_ptr<Planner> make_dqn_planner(PlannerKind kind, DqnPolicy policy) {
  if (kind != PlannerKind::Dqn && kind != PlannerKind::DqnMap)
    throw std::invalid_argument("make_dqn_planner: kind must be dqn or dqnmap");
  if ((kind == PlannerKind::DqnMap) != policy.with_map)
    throw std::invalid_argument("make_dqn_planner: policy variant mismatch");
  return std::make_unique<DqnPlanner>(kind, std::move(policy));
}

namespace {
constexpr char kPolicyMagic[8] = {'S', 'C', 'A', 'V', 'D', 'Q', 'N', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
}
}  // namespace

void save_policy(const DqnPolicy& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open policy file for writing: " + path);
  out.write(kPolicyMagic, sizeof(kPolicyMagic));
  const std::uint32_t with_map = policy.with_map ? 1 : 0;
  const std::uint32_t n_layers = 3;
  write_raw(out, with_map);
  write_raw(out, n_layers);
  write_raw(out, policy.cost_scale);
  for (const auto& layer : policy.net.layers()) {
    const std::uint32_t in = layer.in, outn = layer.out;
    write_raw(out, in);
    write_raw(out, outn);
  }
  for (const auto& layer : policy.net.layers()) {
    out.write(reinterpret_cast<const char*>(layer.w.data()),
              static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(layer.b.data()),
              static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing policy file: " + path);
}

DqnPolicy load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open policy file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPolicyMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a policy file: " + path);
  std::uint32_t with_map = 0, n_layers = 0;
  read_raw(in, with_map);
  read_raw(in, n_layers);
  DqnPolicy policy;
  read_raw(in, policy.cost_scale);
  if (n_layers != 3) throw std::runtime_error("unsupported policy layout");
  std::uint32_t dims[6];
  for (auto& d : dims) read_raw(in, d);
  if (!in) throw std::runtime_error("truncated policy file: " + path);
  if (dims[1] != dims[2] || dims[3] != dims[4])
    throw std::runtime_error("inconsistent policy layer sizes");
  QNetwork net(static_cast<int>(dims[0]), static_cast<int>(dims[5]),
               static_cast<int>(dims[1]));
  for (auto& layer : net.layers()) {
    in.read(reinterpret_cast<char*>(layer.w.data()),
            static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(layer.b.data()),
            static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
  }
  if (!in) throw std::runtime_error("truncated policy file: " + path);
  policy.net = std::move(net);
  policy.with_map = with_map != 0;
  return policy;
}

void write_curve_csv(std::span<const EpochStats> curve, std::ostream& out) {
  out << "epoch,mean_test_return,epsilon,lr\n";
  char buf[128];
  for (const auto& row : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", row.epoch,
                  row.mean_test_return, row.epsilon, row.lr);
    out << buf;
  }
}

}  // namespace scav
