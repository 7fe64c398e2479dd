#include "scav/env_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace scav {

namespace {

using json = nlohmann::ordered_json;

constexpr double kLoadSumTolerance = 1e-6;

WeightedGraph graph_from_nodes(const json& nodes) {
  if (!nodes.is_array() || nodes.empty())
    throw std::runtime_error("environment: \"nodes\" must be a non-empty array");
  std::vector<Point> coords(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  for (const auto& entry : nodes) {
    const int id = entry.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(nodes.size()) || seen[id])
      throw std::runtime_error("environment: node ids must be 0..l-1, each once");
    seen[id] = true;
    coords[id] = {entry.at("x").get<double>(), entry.at("y").get<double>()};
  }
  return euclidean_graph(std::move(coords));
}

WeightedGraph graph_from_matrix(const json& matrix) {
  if (!matrix.is_array() || matrix.empty())
    throw std::runtime_error("environment: \"cost_matrix\" must be a non-empty array");
  const int l = static_cast<int>(matrix.size());
  std::vector<double> raw(static_cast<std::size_t>(l) * l, kNoEdge);
  for (int i = 0; i < l; ++i) {
    const auto& row = matrix.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != l)
      throw std::runtime_error("environment: cost matrix must be square");
    for (int j = 0; j < l; ++j) {
      const auto& cell = row.at(j);
      if (cell.is_null()) continue;  // absent edge
      const double c = cell.get<double>();
      if (c >= 0.0) raw[static_cast<std::size_t>(l) * i + j] = c;
    }
  }
  return metric_closure(l, raw);
}

}  // namespace

Environment parse_environment(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("environment: invalid JSON: ") + e.what());
  }

  const bool has_nodes = doc.contains("nodes");
  const bool has_matrix = doc.contains("cost_matrix");
  if (has_nodes == has_matrix)
    throw std::runtime_error(
        "environment: provide exactly one of \"nodes\" or \"cost_matrix\"");

  Environment env;
  env.graph = has_nodes ? graph_from_nodes(doc.at("nodes"))
                        : graph_from_matrix(doc.at("cost_matrix"));
  const int l = env.graph.node_count();

  if (doc.contains("name")) env.name = doc.at("name").get<std::string>();
  env.start = doc.value("start", 0);
  if (env.start < 0 || env.start >= l)
    throw std::runtime_error("environment: start node out of range");

  if (!doc.contains("objects") || !doc.at("objects").is_array() ||
      doc.at("objects").empty())
    throw std::runtime_error("environment: \"objects\" must be a non-empty array");

  const auto& objects = doc.at("objects");
  const int k = static_cast<int>(objects.size());
  std::vector<double> probs(static_cast<std::size_t>(k) * l, 0.0);
  for (int o = 0; o < k; ++o) {
    const auto& entry = objects.at(o);
    env.object_names.push_back(entry.value("name", std::string(1, char('A' + o % 26))));
    const auto& locations = entry.at("locations");
    if (!locations.is_object() || locations.empty())
      throw std::runtime_error("environment: object " + std::to_string(o) +
                               " needs a non-empty \"locations\" map");
    double sum = 0.0;
    for (const auto& [key, value] : locations.items()) {
      int node = -1;
      try {
        node = std::stoi(key);
      } catch (...) {
      }
      if (node < 0 || node >= l)
        throw std::runtime_error("environment: object " + std::to_string(o) +
                                 " references invalid node \"" + key + "\"");
      const double p = value.get<double>();
      if (!(p >= 0.0))
        throw std::runtime_error("environment: probabilities must be non-negative");
      probs[static_cast<std::size_t>(o) * l + node] += p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kLoadSumTolerance)
      throw std::runtime_error("environment: object " + std::to_string(o) +
                               " probabilities sum to " + std::to_string(sum) +
                               ", expected 1");
    for (int n = 0; n < l; ++n) probs[static_cast<std::size_t>(o) * l + n] /= sum;
  }
  env.prior = PriorModel(k, l, std::move(probs));
  return env;
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open environment file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_environment(buf.str());
}

std::string environment_to_json(const Environment& env) {
  json doc;
  if (!env.name.empty()) doc["name"] = env.name;
  const int l = env.graph.node_count();
  if (env.graph.has_coords()) {
    json nodes = json::array();
    for (int i = 0; i < l; ++i) {
      const Point& p = env.graph.coords()[i];
      nodes.push_back({{"id", i}, {"x", p.x}, {"y", p.y}});
    }
    doc["nodes"] = std::move(nodes);
  } else {
    json matrix = json::array();
    for (int i = 0; i < l; ++i) {
      json row = json::array();
      for (int j = 0; j < l; ++j) row.push_back(env.graph.cost(i, j));
      matrix.push_back(std::move(row));
    }
    doc["cost_matrix"] = std::move(matrix);
  }
  doc["start"] = env.start;

  json objects = json::array();
  for (int o = 0; o < env.prior.object_count(); ++o) {
    json locations = json::object();
    for (int n = 0; n < l; ++n) {
      const double p = env.prior.prob(o, n);
      if (p > 0.0) locations[std::to_string(n)] = p;
    }
    const std::string name = o < static_cast<int>(env.object_names.size())
                                 ? env.object_names[o]
                                 : std::string(1, char('A' + o % 26));
    objects.push_back({{"name", name}, {"locations", std::move(locations)}});
  }
  doc["objects"] = std::move(objects);
  return doc.dump(2) + "\n";
}

void save_environment(const Environment& env, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open environment file for writing: " + path);
  out << environment_to_json(env);
  if (!out) throw std::runtime_error("failed writing environment file: " + path);
}

}  // namespace scav
