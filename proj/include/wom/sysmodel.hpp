#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wom/infostruct.hpp"
#include "wom/netgraph.hpp"

namespace wom {

/// A primitive random variable. A single probability vector means the same
/// distribution at every time.
struct PrimitiveSpec {
  int size = 1;
  std::vector<std::vector<double>> probs_per_t{{1.0}};

  const std::vector<double>& at(int t) const {
    return probs_per_t.size() == 1 ? probs_per_t.front() : probs_per_t[static_cast<size_t>(t)];
  }
};

struct SystemSpec {
  int horizon = 0;
  int state_size = 1;
  std::vector<int> control_sizes;
  std::vector<int> observation_sizes;
  PrimitiveSpec disturbance;
  std::vector<PrimitiveSpec> noises;
  std::vector<double> initial_probs;
  std::vector<std::vector<std::vector<std::vector<int>>>> transition;   // [t][x][u_joint][w] -> x'
  std::vector<std::vector<std::vector<std::vector<int>>>> observation;  // [k][t][x][v] -> y
  std::vector<std::vector<std::vector<double>>> cost;                    // [t][x][u_joint]

  int agents() const { return static_cast<int>(control_sizes.size()); }
  int joint_control_count() const;
  /// Row-major over agents, agent 1 most significant.
  int joint_control_index(std::span<const int> controls) const;
};

struct Instance {
  NetworkSpec network;
  SystemSpec system;
  std::optional<std::vector<std::vector<InfoSchema>>> memories;  // explicit override, [t][k]

  // Filled by validate_instance.
  DelayMatrix delays;
  InfoStructure info;
  Cardinalities card;

  int agents() const { return system.agents(); }
  int horizon() const { return system.horizon; }
};

/// Checks every table and distribution and derives delays and information
/// sets. Explicit memories, when present, replace the delay-derived ones.
Instance validate_instance(SystemSpec system, NetworkSpec network,
                           std::optional<std::vector<std::vector<InfoSchema>>> memories = std::nullopt);

/// tables[t][k][memory realization index] -> control.
struct ControlStrategy {
  std::vector<std::vector<std::vector<int>>> tables;
};

/// All-zero strategy shaped for the instance.
ControlStrategy zero_strategy(const Instance& inst);
void check_strategy(const Instance& inst, const ControlStrategy& g);

struct CostReport {
  enum class Method { Exact, MonteCarlo };
  double expected_cost = 0.0;
  std::vector<double> per_stage_costs;
  Method method = Method::Exact;
  double stderr_ = 0.0;
  uint64_t sample_count = 0;
  uint64_t seed = 0;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Every variable that can exist up to the horizon gets a fixed slot in a flat
/// history vector; slot order is the canonical variable order.
class VariableLayout {
 public:
  VariableLayout() = default;
  VariableLayout(int agents, int horizon) : agents_(agents), horizon_(horizon) {}
  int slot(const VariableId& v) const { return (v.time * agents_ + v.agent) * 2 + static_cast<int>(v.kind); }
  size_t size() const { return static_cast<size_t>((horizon_ + 1) * agents_ * 2); }
  std::vector<int> slots(const InfoSchema& s) const;

 private:
  int agents_ = 0;
  int horizon_ = 0;
};

/// System state plus every realized variable so far (-1 when not yet set).
struct History {
  int x = 0;
  std::vector<int> values;
  friend auto operator<=>(const History&, const History&) = default;
};

/// Distribution over histories; identical histories are merged.
using Layer = std::map<History, double>;

/// Joint draws of X_0 and the time-0 noises.
Layer initial_layer(const Instance& inst);
/// Samples W_t and V_{t+1}; controls U_t must already be set.
Layer advance_layer(const Instance& inst, const Layer& layer, int t);
/// Projection of a history onto a schema, as a realization index.
size_t project(const History& h, const std::vector<int>& slots, const Domain& dom);
/// Expected c_t over the layer; controls U_t must be set.
double layer_stage_cost(const Instance& inst, const Layer& layer, int t);

/// Relabels agents: new agent p is old agent perm[p]. Links, tables, joint
/// control indices and explicit memories are all remapped.
Instance permute_agents(const Instance& inst, const std::vector<int>& perm);

CostReport exact_strategy_cost(const Instance& inst, const ControlStrategy& g);
CostReport monte_carlo_cost(const Instance& inst, const ControlStrategy& g, uint64_t samples, uint64_t seed);

}  // namespace wom
