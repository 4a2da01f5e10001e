#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "wom/netgraph.hpp"

namespace wom {

enum class VarKind : int { Y = 0, U = 1 };

/// Observation or control of one agent at one time. Ordered by (time, agent,
/// kind), which is the canonical order of every schema.
struct VariableId {
  int agent = 0;
  VarKind kind = VarKind::Y;
  int time = 0;

  friend bool operator==(const VariableId&, const VariableId&) = default;
  friend std::strong_ordering operator<=>(const VariableId& a, const VariableId& b) {
    return std::tuple(a.time, a.agent, static_cast<int>(a.kind)) <=>
           std::tuple(b.time, b.agent, static_cast<int>(b.kind));
  }
};

inline VariableId Yv(int agent, int time) { return {agent, VarKind::Y, time}; }
inline VariableId Uv(int agent, int time) { return {agent, VarKind::U, time}; }

/// "Y^2_0" style label with 1-based agent.
std::string to_string(const VariableId& v);

/// Sorted, duplicate-free list of variables.
using InfoSchema = std::vector<VariableId>;

InfoSchema make_schema(std::vector<VariableId> vars);
InfoSchema schema_union(const InfoSchema& a, const InfoSchema& b);
InfoSchema schema_intersection(const InfoSchema& a, const InfoSchema& b);
InfoSchema schema_difference(const InfoSchema& a, const InfoSchema& b);
bool schema_contains(const InfoSchema& s, const VariableId& v);
bool schema_subset(const InfoSchema& sub, const InfoSchema& super);
std::string to_string(const InfoSchema& s);

/// Position of each element of `sub` inside `super`; SchemaMismatch if absent.
std::vector<int> positions_in(const InfoSchema& sub, const InfoSchema& super);

struct Cardinalities {
  std::vector<int> observation;
  std::vector<int> control;
  int of(const VariableId& v) const {
    return v.kind == VarKind::Y ? observation[static_cast<size_t>(v.agent)] : control[static_cast<size_t>(v.agent)];
  }
};

/// Mixed-radix encoding of joint realizations, first coordinate most
/// significant.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<int> radices);
  Domain(const InfoSchema& schema, const Cardinalities& card);

  const std::vector<int>& radices() const { return radices_; }
  size_t size() const { return size_; }
  size_t encode(std::span<const int> values) const;
  std::vector<int> decode(size_t index) const;

 private:
  std::vector<int> radices_;
  size_t size_ = 1;
};

/// Every information set of every agent at every time, computed once.
class InfoStructure {
 public:
  InfoStructure() = default;

  static InfoStructure from_delays(const DelayMatrix& delays, int horizon);
  /// memories[t][k]; validated for range, causality, perfect recall and
  /// containment of the agent's own current observation.
  static InfoStructure from_memories(int agents, int horizon, std::vector<std::vector<InfoSchema>> memories);

  int agents() const { return agents_; }
  int horizon() const { return horizon_; }

  const InfoSchema& memory(int t, int k) const { return memory_[idx(t, k)]; }
  const InfoSchema& accessible(int t, int k) const { return accessible_[idx(t, k)]; }
  /// M_t^k minus A_t^i; IndexOrder when i < k.
  const InfoSchema& inaccessible(int t, int k, int i) const;
  /// A_t^k minus A_{t-1}^k, with A_0^k at t = 0.
  const InfoSchema& new_info(int t, int k) const { return new_info_[idx(t, k)]; }
  /// Variable part of the equivalent state; the system state is implicit.
  const InfoSchema& equivalent_state(int t, int k) const { return equivalent_[idx(t, k)]; }
  /// Equivalent state plus accessible variables that re-enter it later. This
  /// is what the belief filter carries.
  const InfoSchema& filter_state(int t, int k) const { return filter_[idx(t, k)]; }

  /// Domain of the owner's prescription for `target`.
  const InfoSchema& prescription_domain(int t, int owner, int target) const {
    return target < owner ? inaccessible(t, target, owner) : inaccessible(t, target, target);
  }
  /// What the owner's law for `target` is allowed to condition on.
  const InfoSchema& conditioning(int t, int owner, int target) const {
    return target < owner ? accessible(t, owner) : accessible(t, target);
  }

  /// Variables created between t and t+1: Y_{t+1} and U_t of every agent.
  InfoSchema fresh_variables(int t) const;

  bool explicit_memories() const { return explicit_; }

 private:
  size_t idx(int t, int k) const { return static_cast<size_t>(t * agents_ + k); }
  void derive();

  int agents_ = 0;
  int horizon_ = 0;
  bool explicit_ = false;
  std::vector<InfoSchema> memory_, accessible_, new_info_, equivalent_, filter_;
  std::vector<InfoSchema> inaccessible_;  // [t][k][i], filled for i >= k
};

InfoSchema memory_schema(const DelayMatrix& delays, int horizon, int t, int k);
InfoSchema accessible_schema(const DelayMatrix& delays, int horizon, int t, int k);
InfoSchema inaccessible_schema(const DelayMatrix& delays, int horizon, int t, int k, int i);
InfoSchema new_info_schema(const DelayMatrix& delays, int horizon, int t, int k);
InfoSchema equivalent_state_schema(const DelayMatrix& delays, int horizon, int t, int k);

/// Greedy ordering by shared final-time memory; result[p] is the original
/// agent placed at position p.
std::vector<int> index_agents(const InfoStructure& info);
std::vector<int> index_agents(const DelayMatrix& delays, int horizon);

}  // namespace wom
