#include "wom/sysmodel.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "wom/error.hpp"

namespace wom {

namespace {

constexpr double kNormTol = 1e-9;

std::string fmt_sum(double s) {
  std::ostringstream os;
  os.precision(12);
  os << s;
  return os.str();
}

void check_distribution(const std::vector<double>& p, size_t size, const std::string& field) {
  if (p.size() != size)
    throw Error(ErrorKind::ShapeMismatch,
                field + " has " + std::to_string(p.size()) + " entries, expected " + std::to_string(size));
  double sum = 0.0;
  for (double q : p) {
    if (!(q >= 0.0)) throw Error(ErrorKind::DistributionNotNormalized, field + " has a negative entry");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kNormTol)
    throw Error(ErrorKind::DistributionNotNormalized, field + " sums to " + fmt_sum(sum));
}

// Noises are drawn at t = 0..T, the disturbance only at t = 0..T-1.
void check_primitive(const PrimitiveSpec& p, int horizon, bool disturbance, const std::string& field) {
  if (p.size < 1) throw Error(ErrorKind::ShapeMismatch, field + ".size must be positive");
  const size_t n = p.probs_per_t.size();
  const bool short_ok = disturbance && horizon > 1 && n == static_cast<size_t>(horizon);
  if (n != 1 && n != static_cast<size_t>(horizon + 1) && !short_ok)
    throw Error(ErrorKind::ShapeMismatch, field + ".probs_per_t must hold one vector or one per time");
  for (size_t t = 0; t < n; ++t)
    check_distribution(p.probs_per_t[t], static_cast<size_t>(p.size), field + ".probs_per_t[" + std::to_string(t) + "]");
}

template <class T>
void check_len(const std::vector<T>& v, size_t n, const std::string& field) {
  if (v.size() != n)
    throw Error(ErrorKind::ShapeMismatch,
                field + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
}

// Joint noise vectors at time t with positive probability.
struct NoiseDraw {
  std::vector<int> v;
  double p;
};

std::vector<NoiseDraw> noise_draws(const SystemSpec& sys, int t) {
  std::vector<NoiseDraw> out{{{}, 1.0}};
  for (const PrimitiveSpec& n : sys.noises) {
    std::vector<NoiseDraw> next;
    const std::vector<double>& probs = n.at(t);
    for (const NoiseDraw& d : out)
      for (int v = 0; v < n.size; ++v) {
        if (probs[static_cast<size_t>(v)] <= 0.0) continue;
        NoiseDraw e = d;
        e.v.push_back(v);
        e.p *= probs[static_cast<size_t>(v)];
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

int joint_u(const Instance& inst, const History& h, int t, const VariableLayout& lay) {
  int u = 0;
  for (int k = 0; k < inst.agents(); ++k) {
    const int v = h.values[static_cast<size_t>(lay.slot(Uv(k, t)))];
    if (v < 0) throw Error(ErrorKind::SchemaMismatch, "control of agent " + std::to_string(k + 1) + " not set");
    u = u * inst.system.control_sizes[static_cast<size_t>(k)] + v;
  }
  return u;
}

struct MemoryIndex {
  std::vector<std::vector<int>> slots;  // [t*K+k]
  std::vector<Domain> doms;
};

MemoryIndex memory_index(const Instance& inst, const VariableLayout& lay) {
  MemoryIndex mi;
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int k = 0; k < inst.agents(); ++k) {
      mi.slots.push_back(lay.slots(inst.info.memory(t, k)));
      mi.doms.emplace_back(inst.info.memory(t, k), inst.card);
    }
  return mi;
}

int sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  int last = 0;
  for (size_t n = 0; n < probs.size(); ++n) {
    if (probs[n] <= 0.0) continue;
    acc += probs[n];
    last = static_cast<int>(n);
    if (r < acc) return last;
  }
  return last;
}

}  // namespace

int SystemSpec::joint_control_count() const {
  int n = 1;
  for (int c : control_sizes) n *= c;
  return n;
}

int SystemSpec::joint_control_index(std::span<const int> controls) const {
  int u = 0;
  for (size_t k = 0; k < control_sizes.size(); ++k) u = u * control_sizes[k] + controls[k];
  return u;
}

std::vector<int> VariableLayout::slots(const InfoSchema& s) const {
  std::vector<int> out;
  out.reserve(s.size());
  for (const VariableId& v : s) out.push_back(slot(v));
  return out;
}

Instance validate_instance(SystemSpec sys, NetworkSpec network,
                           std::optional<std::vector<std::vector<InfoSchema>>> memories) {
  const int K = sys.agents();
  const int T = sys.horizon;
  if (K < 1) throw Error(ErrorKind::ShapeMismatch, "system.control_sizes must list at least one agent");
  if (network.agents != K)
    throw Error(ErrorKind::AgentCountMismatch, "network has " + std::to_string(network.agents) +
                                                   " agents but system has " + std::to_string(K));
  if (T < 0) throw Error(ErrorKind::ShapeMismatch, "system.horizon must be nonnegative");
  if (sys.state_size < 1) throw Error(ErrorKind::ShapeMismatch, "system.state_size must be positive");
  if (sys.observation_sizes.size() != static_cast<size_t>(K))
    throw Error(ErrorKind::AgentCountMismatch, "system.observation_sizes must have one entry per agent");
  if (sys.noises.size() != static_cast<size_t>(K))
    throw Error(ErrorKind::AgentCountMismatch, "system.noises must have one entry per agent");
  for (int k = 0; k < K; ++k) {
    if (sys.control_sizes[static_cast<size_t>(k)] < 1 || sys.observation_sizes[static_cast<size_t>(k)] < 1)
      throw Error(ErrorKind::ShapeMismatch, "control and observation sizes must be positive");
    check_primitive(sys.noises[static_cast<size_t>(k)], T, false, "system.noises[" + std::to_string(k) + "]");
  }
  check_primitive(sys.disturbance, T, true, "system.disturbance");
  check_distribution(sys.initial_probs, static_cast<size_t>(sys.state_size), "system.initial_probs");

  const size_t X = static_cast<size_t>(sys.state_size);
  const size_t J = static_cast<size_t>(sys.joint_control_count());
  if (sys.transition.size() != static_cast<size_t>(T) && sys.transition.size() != static_cast<size_t>(T + 1))
    throw Error(ErrorKind::ShapeMismatch, "system.transition must cover t = 0.." + std::to_string(T - 1));
  for (size_t t = 0; t < sys.transition.size(); ++t) {
    const std::string f = "system.transition[" + std::to_string(t) + "]";
    check_len(sys.transition[t], X, f);
    for (size_t x = 0; x < X; ++x) {
      check_len(sys.transition[t][x], J, f + "[" + std::to_string(x) + "]");
      for (size_t u = 0; u < J; ++u) {
        const auto& row = sys.transition[t][x][u];
        check_len(row, static_cast<size_t>(sys.disturbance.size), f + "[" + std::to_string(x) + "][" + std::to_string(u) + "]");
        for (int nx : row)
          if (nx < 0 || static_cast<size_t>(nx) >= X)
            throw Error(ErrorKind::ShapeMismatch, f + " maps to state " + std::to_string(nx) + " outside the state space");
      }
    }
  }
  check_len(sys.observation, static_cast<size_t>(K), "system.observation");
  for (int k = 0; k < K; ++k) {
    const std::string f = "system.observation[" + std::to_string(k) + "]";
    const auto& obs = sys.observation[static_cast<size_t>(k)];
    check_len(obs, static_cast<size_t>(T + 1), f);
    for (size_t t = 0; t < obs.size(); ++t) {
      check_len(obs[t], X, f + "[" + std::to_string(t) + "]");
      for (size_t x = 0; x < X; ++x) {
        check_len(obs[t][x], static_cast<size_t>(sys.noises[static_cast<size_t>(k)].size),
                  f + "[" + std::to_string(t) + "][" + std::to_string(x) + "]");
        for (int y : obs[t][x])
          if (y < 0 || y >= sys.observation_sizes[static_cast<size_t>(k)])
            throw Error(ErrorKind::ShapeMismatch, f + " produces observation " + std::to_string(y) + " out of range");
      }
    }
  }
  check_len(sys.cost, static_cast<size_t>(T + 1), "system.cost");
  for (size_t t = 0; t < sys.cost.size(); ++t) {
    check_len(sys.cost[t], X, "system.cost[" + std::to_string(t) + "]");
    for (size_t x = 0; x < X; ++x) {
      check_len(sys.cost[t][x], J, "system.cost[" + std::to_string(t) + "][" + std::to_string(x) + "]");
      for (double c : sys.cost[t][x])
        if (!std::isfinite(c)) throw Error(ErrorKind::ShapeMismatch, "system.cost contains a non-finite value");
    }
  }

  Instance inst;
  inst.network = validate_network(std::move(network));
  inst.delays = compute_delay_matrix(inst.network);
  inst.card.observation = sys.observation_sizes;
  inst.card.control = sys.control_sizes;
  inst.system = std::move(sys);
  inst.memories = std::move(memories);
  inst.info = inst.memories ? InfoStructure::from_memories(K, T, *inst.memories) : InfoStructure::from_delays(inst.delays, T);
  return inst;
}

ControlStrategy zero_strategy(const Instance& inst) {
  ControlStrategy g;
  g.tables.resize(static_cast<size_t>(inst.horizon() + 1));
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int k = 0; k < inst.agents(); ++k)
      g.tables[static_cast<size_t>(t)].emplace_back(Domain(inst.info.memory(t, k), inst.card).size(), 0);
  return g;
}

void check_strategy(const Instance& inst, const ControlStrategy& g) {
  if (g.tables.size() != static_cast<size_t>(inst.horizon() + 1))
    throw Error(ErrorKind::DomainMismatch, "strategy must have one stage per time 0.." + std::to_string(inst.horizon()));
  for (int t = 0; t <= inst.horizon(); ++t) {
    if (g.tables[static_cast<size_t>(t)].size() != static_cast<size_t>(inst.agents()))
      throw Error(ErrorKind::DomainMismatch, "strategy stage " + std::to_string(t) + " must list every agent");
    for (int k = 0; k < inst.agents(); ++k) {
      const auto& tab = g.tables[static_cast<size_t>(t)][static_cast<size_t>(k)];
      const size_t n = Domain(inst.info.memory(t, k), inst.card).size();
      if (tab.size() != n)
        throw Error(ErrorKind::DomainMismatch, "table of agent " + std::to_string(k + 1) + " at t=" + std::to_string(t) +
                                                   " has " + std::to_string(tab.size()) + " entries, memory has " +
                                                   std::to_string(n) + " realizations");
      for (int u : tab)
        if (u < 0 || u >= inst.card.control[static_cast<size_t>(k)])
          throw Error(ErrorKind::DomainMismatch, "control out of range in table of agent " + std::to_string(k + 1));
    }
  }
}

Layer initial_layer(const Instance& inst) {
  const SystemSpec& sys = inst.system;
  const VariableLayout lay(inst.agents(), inst.horizon());
  Layer layer;
  const auto draws = noise_draws(sys, 0);
  for (int x = 0; x < sys.state_size; ++x) {
    const double px = sys.initial_probs[static_cast<size_t>(x)];
    if (px <= 0.0) continue;
    for (const NoiseDraw& d : draws) {
      History h{x, std::vector<int>(lay.size(), -1)};
      for (int k = 0; k < inst.agents(); ++k)
        h.values[static_cast<size_t>(lay.slot(Yv(k, 0)))] =
            sys.observation[static_cast<size_t>(k)][0][static_cast<size_t>(x)][static_cast<size_t>(d.v[static_cast<size_t>(k)])];
      layer[std::move(h)] += px * d.p;
    }
  }
  return layer;
}

Layer advance_layer(const Instance& inst, const Layer& layer, int t) {
  const SystemSpec& sys = inst.system;
  const VariableLayout lay(inst.agents(), inst.horizon());
  const auto draws = noise_draws(sys, t + 1);
  const std::vector<double>& pw = sys.disturbance.at(t);
  Layer next;
  for (const auto& [h, p] : layer) {
    const int u = joint_u(inst, h, t, lay);
    for (int w = 0; w < sys.disturbance.size; ++w) {
      if (pw[static_cast<size_t>(w)] <= 0.0) continue;
      const int nx = sys.transition[static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(u)][static_cast<size_t>(w)];
      for (const NoiseDraw& d : draws) {
        History n{nx, h.values};
        for (int k = 0; k < inst.agents(); ++k)
          n.values[static_cast<size_t>(lay.slot(Yv(k, t + 1)))] =
              sys.observation[static_cast<size_t>(k)][static_cast<size_t>(t + 1)][static_cast<size_t>(nx)]
                             [static_cast<size_t>(d.v[static_cast<size_t>(k)])];
        next[std::move(n)] += p * pw[static_cast<size_t>(w)] * d.p;
      }
    }
  }
  return next;
}

size_t project(const History& h, const std::vector<int>& slots, const Domain& dom) {
  size_t index = 0;
  for (size_t n = 0; n < slots.size(); ++n)
    index = index * static_cast<size_t>(dom.radices()[n]) + static_cast<size_t>(h.values[static_cast<size_t>(slots[n])]);
  return index;
}

double layer_stage_cost(const Instance& inst, const Layer& layer, int t) {
  const VariableLayout lay(inst.agents(), inst.horizon());
  double c = 0.0;
  for (const auto& [h, p] : layer)
    c += p * inst.system.cost[static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(joint_u(inst, h, t, lay))];
  return c;
}

CostReport exact_strategy_cost(const Instance& inst, const ControlStrategy& g) {
  check_strategy(inst, g);
  const VariableLayout lay(inst.agents(), inst.horizon());
  const MemoryIndex mi = memory_index(inst, lay);
  CostReport rep;
  Layer layer = initial_layer(inst);
  for (int t = 0; t <= inst.horizon(); ++t) {
    Layer acted;
    for (const auto& [h, p] : layer) {
      History a = h;
      for (int k = 0; k < inst.agents(); ++k) {
        const size_t c = static_cast<size_t>(t * inst.agents() + k);
        a.values[static_cast<size_t>(lay.slot(Uv(k, t)))] =
            g.tables[static_cast<size_t>(t)][static_cast<size_t>(k)][project(h, mi.slots[c], mi.doms[c])];
      }
      acted.emplace(std::move(a), p);
    }
    rep.per_stage_costs.push_back(layer_stage_cost(inst, acted, t));
    if (t < inst.horizon()) layer = advance_layer(inst, acted, t);
  }
  for (double c : rep.per_stage_costs) rep.expected_cost += c;
  return rep;
}

CostReport monte_carlo_cost(const Instance& inst, const ControlStrategy& g, uint64_t samples, uint64_t seed) {
  check_strategy(inst, g);
  if (samples < 1) throw Error(ErrorKind::OutOfRange, "sample count must be at least 1");
  const SystemSpec& sys = inst.system;
  const int K = inst.agents();
  const int T = inst.horizon();
  const VariableLayout lay(K, T);
  const MemoryIndex mi = memory_index(inst, lay);
  std::mt19937_64 rng(seed);

  std::vector<double> stage_sum(static_cast<size_t>(T + 1), 0.0);
  std::vector<double> totals;
  totals.reserve(static_cast<size_t>(samples));
  History h{0, std::vector<int>(lay.size(), -1)};
  std::vector<int> u(static_cast<size_t>(K));
  for (uint64_t n = 0; n < samples; ++n) {
    std::fill(h.values.begin(), h.values.end(), -1);
    h.x = sample_index(sys.initial_probs, rng);
    double total = 0.0;
    for (int t = 0; t <= T; ++t) {
      for (int k = 0; k < K; ++k) {
        const int v = sample_index(sys.noises[static_cast<size_t>(k)].at(t), rng);
        h.values[static_cast<size_t>(lay.slot(Yv(k, t)))] =
            sys.observation[static_cast<size_t>(k)][static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(v)];
      }
      for (int k = 0; k < K; ++k) {
        const size_t c = static_cast<size_t>(t * K + k);
        u[static_cast<size_t>(k)] = g.tables[static_cast<size_t>(t)][static_cast<size_t>(k)][project(h, mi.slots[c], mi.doms[c])];
        h.values[static_cast<size_t>(lay.slot(Uv(k, t)))] = u[static_cast<size_t>(k)];
      }
      const int uj = sys.joint_control_index(u);
      const double c = sys.cost[static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(uj)];
      stage_sum[static_cast<size_t>(t)] += c;
      total += c;
      if (t < T) {
        const int w = sample_index(sys.disturbance.at(t), rng);
        h.x = sys.transition[static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(uj)][static_cast<size_t>(w)];
      }
    }
    totals.push_back(total);
  }
  const double N = static_cast<double>(samples);
  CostReport rep;
  rep.method = CostReport::Method::MonteCarlo;
  rep.sample_count = samples;
  rep.seed = seed;
  double sum = 0.0;
  for (double v : totals) sum += v;
  rep.expected_cost = sum / N;
  for (double s : stage_sum) rep.per_stage_costs.push_back(s / N);
  if (samples > 1) {
    double ss = 0.0;
    for (double v : totals) ss += (v - rep.expected_cost) * (v - rep.expected_cost);
    rep.stderr_ = std::sqrt(ss / (N - 1.0) / N);
  }
  return rep;
}

}  // namespace wom

namespace wom {

Instance permute_agents(const Instance& inst, const std::vector<int>& perm) {
  const int K = inst.agents();
  if (perm.size() != static_cast<size_t>(K)) throw Error(ErrorKind::InvalidAgent, "permutation has the wrong length");
  std::vector<int> inv(static_cast<size_t>(K), -1);
  for (int p = 0; p < K; ++p) {
    const int o = perm[static_cast<size_t>(p)];
    if (o < 0 || o >= K || inv[static_cast<size_t>(o)] >= 0) throw Error(ErrorKind::InvalidAgent, "not a permutation");
    inv[static_cast<size_t>(o)] = p;
  }
  const SystemSpec& old = inst.system;
  SystemSpec sys = old;
  for (int p = 0; p < K; ++p) {
    const size_t o = static_cast<size_t>(perm[static_cast<size_t>(p)]);
    sys.control_sizes[static_cast<size_t>(p)] = old.control_sizes[o];
    sys.observation_sizes[static_cast<size_t>(p)] = old.observation_sizes[o];
    sys.noises[static_cast<size_t>(p)] = old.noises[o];
    sys.observation[static_cast<size_t>(p)] = old.observation[o];
  }
  // Joint control index under the new order -> index under the old order.
  const int J = old.joint_control_count();
  std::vector<int> to_old(static_cast<size_t>(J));
  {
    std::vector<int> u(static_cast<size_t>(K)), uo(static_cast<size_t>(K));
    for (int j = 0; j < J; ++j) {
      int rest = j;
      for (int p = K - 1; p >= 0; --p) {
        u[static_cast<size_t>(p)] = rest % sys.control_sizes[static_cast<size_t>(p)];
        rest /= sys.control_sizes[static_cast<size_t>(p)];
      }
      for (int p = 0; p < K; ++p) uo[static_cast<size_t>(perm[static_cast<size_t>(p)])] = u[static_cast<size_t>(p)];
      to_old[static_cast<size_t>(j)] = old.joint_control_index(uo);
    }
  }
  for (size_t t = 0; t < old.transition.size(); ++t)
    for (size_t x = 0; x < old.transition[t].size(); ++x)
      for (int j = 0; j < J; ++j)
        sys.transition[t][x][static_cast<size_t>(j)] = old.transition[t][x][static_cast<size_t>(to_old[static_cast<size_t>(j)])];
  for (size_t t = 0; t < old.cost.size(); ++t)
    for (size_t x = 0; x < old.cost[t].size(); ++x)
      for (int j = 0; j < J; ++j)
        sys.cost[t][x][static_cast<size_t>(j)] = old.cost[t][x][static_cast<size_t>(to_old[static_cast<size_t>(j)])];

  NetworkSpec net = inst.network;
  for (Link& l : net.links) {
    l.from = inv[static_cast<size_t>(l.from)];
    l.to = inv[static_cast<size_t>(l.to)];
  }
  std::optional<std::vector<std::vector<InfoSchema>>> mem;
  if (inst.memories) {
    mem.emplace();
    for (const auto& stage : *inst.memories) {
      std::vector<InfoSchema> ns(static_cast<size_t>(K));
      for (int p = 0; p < K; ++p) {
        InfoSchema s = stage[static_cast<size_t>(perm[static_cast<size_t>(p)])];
        for (VariableId& v : s) v.agent = inv[static_cast<size_t>(v.agent)];
        ns[static_cast<size_t>(p)] = make_schema(std::move(s));
      }
      mem->push_back(std::move(ns));
    }
  }
  return validate_instance(std::move(sys), std::move(net), std::move(mem));
}

}  // namespace wom
