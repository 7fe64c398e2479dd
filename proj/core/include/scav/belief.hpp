#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scav/graph.hpp"
#include "scav/rng.hpp"

namespace scav {

using ObjectId = int;

/// Per-object categorical location priors: k rows of length l, each row
/// summing to 1. Immutable; shared read-only by concurrent trials.
class PriorModel {
 public:
  PriorModel(int object_count, int node_count, std::vector<double> probs);

  static PriorModel uniform(int object_count, int node_count);

  int object_count() const { return object_count_; }
  int node_count() const { return node_count_; }
  double prob(ObjectId o, NodeId n) const {
    return probs_[static_cast<std::size_t>(o) * node_count_ + n];
  }
  std::span<const double> row(ObjectId o) const {
    return {probs_.data() + static_cast<std::size_t>(o) * node_count_,
            static_cast<std::size_t>(node_count_)};
  }
  std::span<const double> flat() const { return probs_; }

 private:
  int object_count_ = 0;
  int node_count_ = 0;
  std::vector<double> probs_;  // k*l row-major
};

/// location[o] = X_o, the hidden true node of object o.
using Arrangement = std::vector<NodeId>;

/// One independent categorical draw per object. Deterministic given seed.
Arrangement sample_arrangement(const PriorModel& prior, std::uint64_t seed);
Arrangement sample_arrangement(const PriorModel& prior, Rng& rng);

/// Posterior location distributions plus the found flags, maintained by
/// Bayesian updates as nodes are visited. One instance per trial; never
/// shared between concurrent hunts.
class BeliefState {
 public:
  explicit BeliefState(const PriorModel& prior);

  int object_count() const { return object_count_; }
  int node_count() const { return node_count_; }

  bool found(ObjectId o) const { return found_[o]; }
  const std::vector<bool>& found_flags() const { return found_; }
  bool all_found() const { return unfound_count_ == 0; }
  int unfound_count() const { return unfound_count_; }

  /// Node where object o was found; only valid when found(o).
  NodeId found_at(ObjectId o) const { return found_at_[o]; }

  double posterior(ObjectId o, NodeId n) const {
    return posterior_[static_cast<std::size_t>(o) * node_count_ + n];
  }
  std::span<const double> row(ObjectId o) const {
    return {posterior_.data() + static_cast<std::size_t>(o) * node_count_,
            static_cast<std::size_t>(node_count_)};
  }

  /// Incorporates the full observation at `node`: `present` is exactly the
  /// set of objects located there. Present objects become found (point
  /// mass); each unfound absent object has its mass at `node` zeroed and
  /// the rest renormalized. Throws InconsistencyError if the observation
  /// contradicts the current posterior.
  void update_on_visit(NodeId node, std::span<const ObjectId> present);

  /// 1 - prod over unfound o of (1 - posterior(o, node)). Found objects do
  /// not contribute; 0 when everything is found.
  double prob_any_unfound(NodeId node) const;

 private:
  int object_count_ = 0;
  int node_count_ = 0;
  int unfound_count_ = 0;
  std::vector<double> posterior_;
  std::vector<bool> found_;
  std::vector<NodeId> found_at_;
};

/// Cartesian product of the unfound objects' posterior supports.
/// `objects` lists the unfound ids in ascending order; arrangement i places
/// objects[j] at nodes[i][j] with probability probabilities[i].
struct ArrangementEnumeration {
  std::vector<ObjectId> objects;
  std::vector<std::vector<NodeId>> nodes;
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
};

/// Enumerates every arrangement of the unfound objects consistent with the
/// posterior, with product probabilities summing to 1. Throws
/// InfeasibleError when the product of support sizes exceeds `cap`
/// (callers should fall back to sampling).
ArrangementEnumeration enumerate_posterior_arrangements(
    const BeliefState& belief, std::size_t cap = 1'000'000);

}  // namespace scav
