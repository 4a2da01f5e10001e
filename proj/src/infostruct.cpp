#include "wom/infostruct.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

#include "wom/error.hpp"

namespace wom {

std::string to_string(const VariableId& v) {
  return std::string(v.kind == VarKind::Y ? "Y^" : "U^") + std::to_string(v.agent + 1) + "_" + std::to_string(v.time);
}

std::string to_string(const InfoSchema& s) {
  std::string out = "{";
  for (size_t n = 0; n < s.size(); ++n) {
    if (n) out += ", ";
    out += to_string(s[n]);
  }
  return out + "}";
}

InfoSchema make_schema(std::vector<VariableId> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

InfoSchema schema_union(const InfoSchema& a, const InfoSchema& b) {
  InfoSchema out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

InfoSchema schema_intersection(const InfoSchema& a, const InfoSchema& b) {
  InfoSchema out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

InfoSchema schema_difference(const InfoSchema& a, const InfoSchema& b) {
  InfoSchema out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool schema_contains(const InfoSchema& s, const VariableId& v) { return std::binary_search(s.begin(), s.end(), v); }

bool schema_subset(const InfoSchema& sub, const InfoSchema& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

std::vector<int> positions_in(const InfoSchema& sub, const InfoSchema& super) {
  std::vector<int> pos;
  pos.reserve(sub.size());
  for (const VariableId& v : sub) {
    auto it = std::lower_bound(super.begin(), super.end(), v);
    if (it == super.end() || *it != v)
      throw Error(ErrorKind::SchemaMismatch, to_string(v) + " is not part of " + to_string(super));
    pos.push_back(static_cast<int>(it - super.begin()));
  }
  return pos;
}

Domain::Domain(std::vector<int> radices) : radices_(std::move(radices)) {
  size_ = 1;
  for (int r : radices_) {
    if (r < 1) throw Error(ErrorKind::ShapeMismatch, "domain radix must be positive");
    if (size_ > std::numeric_limits<size_t>::max() / static_cast<size_t>(r))
      throw Error(ErrorKind::CapExceeded, "domain too large to index");
    size_ *= static_cast<size_t>(r);
  }
}

Domain::Domain(const InfoSchema& schema, const Cardinalities& card) : Domain([&] {
  std::vector<int> r;
  r.reserve(schema.size());
  for (const VariableId& v : schema) r.push_back(card.of(v));
  return r;
}()) {}

size_t Domain::encode(std::span<const int> values) const {
  if (values.size() != radices_.size()) throw Error(ErrorKind::OutOfRange, "realization has the wrong length");
  size_t index = 0;
  for (size_t n = 0; n < values.size(); ++n) {
    if (values[n] < 0 || values[n] >= radices_[n])
      throw Error(ErrorKind::OutOfRange, "coordinate " + std::to_string(n) + " value " + std::to_string(values[n]) +
                                             " outside 0.." + std::to_string(radices_[n] - 1));
    index = index * static_cast<size_t>(radices_[n]) + static_cast<size_t>(values[n]);
  }
  return index;
}

std::vector<int> Domain::decode(size_t index) const {
  if (index >= size_) throw Error(ErrorKind::OutOfRange, "realization index " + std::to_string(index) + " out of range");
  std::vector<int> values(radices_.size());
  for (size_t n = radices_.size(); n-- > 0;) {
    values[n] = static_cast<int>(index % static_cast<size_t>(radices_[n]));
    index /= static_cast<size_t>(radices_[n]);
  }
  return values;
}

namespace {

InfoSchema delay_memory(const DelayMatrix& d, int t, int k) {
  std::vector<VariableId> vars;
  for (int j = 0; j < d.size(); ++j) {
    const int lag = d(j, k);
    for (int s = 0; s <= t - lag; ++s) vars.push_back(Yv(j, s));
    for (int s = 0; s <= t - lag - 1; ++s) vars.push_back(Uv(j, s));
  }
  return make_schema(std::move(vars));
}

}  // namespace

InfoSchema InfoStructure::fresh_variables(int t) const {
  InfoSchema out;
  for (int j = 0; j < agents_; ++j) {
    out.push_back(Uv(j, t));
    if (t + 1 <= horizon_) out.push_back(Yv(j, t + 1));
  }
  return make_schema(std::move(out));
}

InfoStructure InfoStructure::from_delays(const DelayMatrix& delays, int horizon) {
  if (horizon < 0) throw Error(ErrorKind::ShapeMismatch, "horizon must be nonnegative");
  InfoStructure info;
  info.agents_ = delays.size();
  info.horizon_ = horizon;
  for (int t = 0; t <= horizon; ++t)
    for (int k = 0; k < info.agents_; ++k) info.memory_.push_back(delay_memory(delays, t, k));
  info.derive();
  return info;
}

InfoStructure InfoStructure::from_memories(int agents, int horizon, std::vector<std::vector<InfoSchema>> memories) {
  if (agents < 1 || horizon < 0) throw Error(ErrorKind::InvalidMemory, "bad agent count or horizon");
  if (memories.size() != static_cast<size_t>(horizon + 1))
    throw Error(ErrorKind::InvalidMemory, "memories must list times 0.." + std::to_string(horizon));
  InfoStructure info;
  info.agents_ = agents;
  info.horizon_ = horizon;
  info.explicit_ = true;
  for (int t = 0; t <= horizon; ++t) {
    if (memories[static_cast<size_t>(t)].size() != static_cast<size_t>(agents))
      throw Error(ErrorKind::InvalidMemory, "memories at t=" + std::to_string(t) + " must list every agent");
    for (int k = 0; k < agents; ++k) {
      InfoSchema m = make_schema(memories[static_cast<size_t>(t)][static_cast<size_t>(k)]);
      const std::string where = "memory of agent " + std::to_string(k + 1) + " at t=" + std::to_string(t);
      for (const VariableId& v : m) {
        if (v.agent < 0 || v.agent >= agents) throw Error(ErrorKind::InvalidMemory, where + " names an unknown agent");
        const int latest = v.kind == VarKind::Y ? t : t - 1;
        if (v.time < 0 || v.time > latest)
          throw Error(ErrorKind::InvalidMemory, where + " contains " + to_string(v) + ", which does not exist yet");
      }
      if (!schema_contains(m, Yv(k, t)))
        throw Error(ErrorKind::InvalidMemory, where + " must contain the agent's own current observation");
      if (t > 0 && !schema_subset(info.memory_[info.idx(t - 1, k)], m))
        throw Error(ErrorKind::InvalidMemory, where + " forgets part of the previous memory");
      info.memory_.push_back(std::move(m));
    }
  }
  info.derive();
  return info;
}

const InfoSchema& InfoStructure::inaccessible(int t, int k, int i) const {
  if (i < k)
    throw Error(ErrorKind::IndexOrder, "inaccessible information of agent " + std::to_string(k + 1) +
                                           " is defined only relative to agents indexed at least as high, got " +
                                           std::to_string(i + 1));
  if (t < 0 || t > horizon_ || k < 0 || i >= agents_) throw Error(ErrorKind::OutOfRange, "schema index out of range");
  return inaccessible_[static_cast<size_t>((t * agents_ + k) * agents_ + i)];
}

void InfoStructure::derive() {
  const int K = agents_;
  const int T = horizon_;
  accessible_.assign(static_cast<size_t>((T + 1) * K), {});
  new_info_ = accessible_;
  equivalent_ = accessible_;
  filter_ = accessible_;
  inaccessible_.assign(static_cast<size_t>((T + 1) * K * K), {});

  for (int t = 0; t <= T; ++t) {
    InfoSchema running;
    for (int k = 0; k < K; ++k) {
      running = k == 0 ? memory(t, 0) : schema_intersection(running, memory(t, k));
      accessible_[idx(t, k)] = running;
    }
    for (int k = 0; k < K; ++k) {
      for (int i = k; i < K; ++i)
        inaccessible_[static_cast<size_t>((t * K + k) * K + i)] = schema_difference(memory(t, k), accessible(t, i));
      new_info_[idx(t, k)] = t == 0 ? accessible(t, k) : schema_difference(accessible(t, k), accessible(t - 1, k));
    }
    for (int k = 0; k < K; ++k) {
      InfoSchema s;
      for (int j = 0; j < K; ++j) s = schema_union(s, j <= k ? inaccessible(t, j, k) : inaccessible(t, j, j));
      equivalent_[idx(t, k)] = s;
    }
  }

  for (int t = 0; t <= T; ++t)
    for (int k = 0; k < K; ++k) {
      InfoSchema later;
      for (int tau = t + 1; tau <= T; ++tau) later = schema_union(later, equivalent_state(tau, k));
      filter_[idx(t, k)] = schema_union(equivalent_state(t, k), schema_intersection(accessible(t, k), later));
    }

  // The accessible sets must nest, and the filter state must be closed under
  // one step of the dynamics; memories built from delays always satisfy this,
  // explicit ones might not.
  for (int t = 0; t <= T; ++t)
    for (int k = 0; k + 1 < K; ++k)
      if (!schema_subset(accessible(t, k + 1), accessible(t, k)))
        throw Error(ErrorKind::InvalidMemory, "accessible information does not nest at t=" + std::to_string(t));
  for (int t = 0; t < T; ++t) {
    const InfoSchema fresh = fresh_variables(t);
    for (int k = 0; k < K; ++k) {
      const InfoSchema reachable = schema_union(filter_state(t, k), fresh);
      if (!schema_subset(accessible(t, k), accessible(t + 1, k)))
        throw Error(ErrorKind::InvalidMemory, "accessible information of agent " + std::to_string(k + 1) +
                                                  " shrinks after t=" + std::to_string(t));
      if (!schema_subset(new_info(t + 1, k), reachable) || !schema_subset(filter_state(t + 1, k), reachable))
        throw Error(ErrorKind::InvalidMemory, "agent " + std::to_string(k + 1) + " receives at t=" +
                                                  std::to_string(t + 1) +
                                                  " old information that no agent held at t=" + std::to_string(t));
    }
  }
}

InfoSchema memory_schema(const DelayMatrix& delays, int horizon, int t, int k) {
  return InfoStructure::from_delays(delays, horizon).memory(t, k);
}
InfoSchema accessible_schema(const DelayMatrix& delays, int horizon, int t, int k) {
  return InfoStructure::from_delays(delays, horizon).accessible(t, k);
}
InfoSchema inaccessible_schema(const DelayMatrix& delays, int horizon, int t, int k, int i) {
  return InfoStructure::from_delays(delays, horizon).inaccessible(t, k, i);
}
InfoSchema new_info_schema(const DelayMatrix& delays, int horizon, int t, int k) {
  return InfoStructure::from_delays(delays, horizon).new_info(t, k);
}
InfoSchema equivalent_state_schema(const DelayMatrix& delays, int horizon, int t, int k) {
  return InfoStructure::from_delays(delays, horizon).equivalent_state(t, k);
}

std::vector<int> index_agents(const InfoStructure& info) {
  const int K = info.agents();
  const int T = info.horizon();
  std::vector<int> order;
  std::vector<char> used(static_cast<size_t>(K), 0);
  InfoSchema shared;
  for (int pos = 0; pos < K; ++pos) {
    int best = -1;
    size_t best_size = 0;
    for (int k = 0; k < K; ++k) {
      if (used[static_cast<size_t>(k)]) continue;
      const size_t size =
          pos == 0 ? info.memory(T, k).size() : schema_intersection(shared, info.memory(T, k)).size();
      if (best < 0 || size > best_size) {
        best = k;
        best_size = size;
      }
    }
    used[static_cast<size_t>(best)] = 1;
    shared = pos == 0 ? info.memory(T, best) : schema_intersection(shared, info.memory(T, best));
    order.push_back(best);
  }
  return order;
}

std::vector<int> index_agents(const DelayMatrix& delays, int horizon) {
  return index_agents(InfoStructure::from_delays(delays, horizon));
}

}  // namespace wom
