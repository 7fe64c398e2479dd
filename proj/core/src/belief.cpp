#include "scav/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "scav/errors.hpp"

namespace scav {

namespace {
constexpr double kRowSumTolerance = 1e-9;
constexpr double kMinRenormMass = 1e-12;
}  // namespace

PriorModel::PriorModel(int object_count, int node_count, std::vector<double> probs)
    : object_count_(object_count), node_count_(node_count), probs_(std::move(probs)) {
  if (object_count_ < 1) throw std::invalid_argument("prior needs at least one object");
  if (node_count_ < 1) throw std::invalid_argument("prior needs at least one node");
  if (probs_.size() != static_cast<std::size_t>(object_count_) * node_count_)
    throw std::invalid_argument("prior matrix size does not match k*l");
  for (int o = 0; o < object_count_; ++o) {
    double sum = 0.0;
    for (int n = 0; n < node_count_; ++n) {
      const double p = prob(o, n);
      if (!(p >= 0.0) || p > 1.0)
        throw std::invalid_argument("prior entries must lie in [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw std::invalid_argument("prior row " + std::to_string(o) +
                                  " does not sum to 1");
  }
}

PriorModel PriorModel::uniform(int object_count, int node_count) {
  std::vector<double> probs(static_cast<std::size_t>(object_count) * node_count,
                            1.0 / node_count);
  return PriorModel(object_count, node_count, std::move(probs));
}

Arrangement sample_arrangement(const PriorModel& prior, std::uint64_t seed) {
  Rng rng(seed);
  return sample_arrangement(prior, rng);
}

Arrangement sample_arrangement(const PriorModel& prior, Rng& rng) {
  Arrangement location(prior.object_count());
  for (ObjectId o = 0; o < prior.object_count(); ++o)
    location[o] = rng.categorical(prior.row(o));
  return location;
}

BeliefState::BeliefState(const PriorModel& prior)
    : object_count_(prior.object_count()),
      node_count_(prior.node_count()),
      unfound_count_(prior.object_count()),
      posterior_(prior.flat().begin(), prior.flat().end()),
      found_(prior.object_count(), false),
      found_at_(prior.object_count(), -1) {}

void BeliefState::update_on_visit(NodeId node, std::span<const ObjectId> present) {
  if (node < 0 || node >= node_count_)
    throw std::invalid_argument("update_on_visit: node out of range");

  std::vector<bool> is_present(object_count_, false);
  for (ObjectId o : present) {
    if (o < 0 || o >= object_count_)
      throw std::invalid_argument("update_on_visit: object out of range");
    is_present[o] = true;
  }

  for (ObjectId o = 0; o < object_count_; ++o) {
    auto* row = posterior_.data() + static_cast<std::size_t>(o) * node_count_;
    if (found_[o]) {
      if (is_present[o] != (found_at_[o] == node))
        throw InconsistencyError("observation of found object " + std::to_string(o) +
                                 " contradicts its known location");
      continue;
    }
    if (is_present[o]) {
      if (row[node] <= 0.0)
        throw InconsistencyError("object " + std::to_string(o) +
                                 " observed at node " + std::to_string(node) +
                                 " where its posterior is zero");
      std::fill(row, row + node_count_, 0.0);
      row[node] = 1.0;
      found_[o] = true;
      found_at_[o] = node;
      --unfound_count_;
    } else {
      if (row[node] == 0.0) continue;  // nothing to remove; keep bits identical
      row[node] = 0.0;
      double remaining = 0.0;
      for (int n = 0; n < node_count_; ++n) remaining += row[n];
      if (remaining < kMinRenormMass)
        throw InconsistencyError(
            "object " + std::to_string(o) + " absent from node " +
            std::to_string(node) + " which held its entire posterior mass");
      for (int n = 0; n < node_count_; ++n) row[n] /= remaining;
    }
  }
}

double BeliefState::prob_any_unfound(NodeId node) const {
  if (node < 0 || node >= node_count_)
    throw std::invalid_argument("prob_any_unfound: node out of range");
  double none = 1.0;
  for (ObjectId o = 0; o < object_count_; ++o) {
    if (found_[o]) continue;
    none *= 1.0 - posterior(o, node);
  }
  return 1.0 - none;
}

ArrangementEnumeration enumerate_posterior_arrangements(const BeliefState& belief,
                                                        std::size_t cap) {
  ArrangementEnumeration out;
  std::vector<std::vector<NodeId>> supports;
  for (ObjectId o = 0; o < belief.object_count(); ++o) {
    if (belief.found(o)) continue;
    out.objects.push_back(o);
    std::vector<NodeId> support;
    for (NodeId n = 0; n < belief.node_count(); ++n)
      if (belief.posterior(o, n) > 0.0) support.push_back(n);
    if (support.empty())
      throw InconsistencyError("object " + std::to_string(o) +
                               " is unfound but has empty support");
    supports.push_back(std::move(support));
  }

  std::size_t total = 1;
  for (const auto& s : supports) {
    if (total > cap / s.size() && total * s.size() > cap)
      throw InfeasibleError(
          "posterior arrangement count exceeds cap of " + std::to_string(cap) +
          "; use sampling instead");
    total *= s.size();
  }

  const std::size_t m = supports.size();
  std::vector<std::size_t> idx(m, 0);
  out.nodes.reserve(total);
  out.probabilities.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<NodeId> nodes(m);
    double p = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      nodes[j] = supports[j][idx[j]];
      p *= belief.posterior(out.objects[j], nodes[j]);
    }
    out.nodes.push_back(std::move(nodes));
    out.probabilities.push_back(p);
    // odometer increment, last object varies fastest
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] < supports[j].size()) break;
      idx[j] = 0;
    }
  }
  return out;
}

}  // namespace scav
