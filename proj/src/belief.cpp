#include "wom/belief.hpp"

#include <algorithm>
#include <cmath>

#include "wom/error.hpp"

namespace wom {

namespace {

constexpr double kImpossible = 1e-12;

// Where each coordinate of the next filter state (or of the new information)
// comes from: an old coordinate, a fresh observation or a fresh control.
struct Source {
  enum class From { Old, FreshY, FreshU } from;
  int index;  // old position or agent
};

struct StepPlan {
  std::vector<std::vector<int>> gamma_pos;  // per target: positions of its domain in the filter state
  std::vector<Source> next, z;
  InfoSchema next_support, z_schema;
};

std::vector<Source> sources(const InfoSchema& wanted, const InfoSchema& old, int t) {
  std::vector<Source> out;
  for (const VariableId& v : wanted) {
    auto it = std::lower_bound(old.begin(), old.end(), v);
    if (it != old.end() && *it == v)
      out.push_back({Source::From::Old, static_cast<int>(it - old.begin())});
    else if (v.kind == VarKind::Y && v.time == t + 1)
      out.push_back({Source::From::FreshY, v.agent});
    else if (v.kind == VarKind::U && v.time == t)
      out.push_back({Source::From::FreshU, v.agent});
    else
      throw Error(ErrorKind::SchemaMismatch, to_string(v) + " cannot be produced from the current equivalent state");
  }
  return out;
}

std::vector<std::vector<int>> gamma_positions(const Instance& inst, int k, int t) {
  std::vector<std::vector<int>> pos;
  for (int i = 0; i < inst.agents(); ++i)
    pos.push_back(positions_in(inst.info.prescription_domain(t, k, i), inst.info.filter_state(t, k)));
  return pos;
}

StepPlan plan(const Instance& inst, int k, int t) {
  if (t >= inst.horizon()) throw Error(ErrorKind::SchemaMismatch, "no transition after the final time");
  StepPlan p;
  p.gamma_pos = gamma_positions(inst, k, t);
  p.next_support = inst.info.filter_state(t + 1, k);
  p.z_schema = inst.info.new_info(t + 1, k);
  p.next = sources(p.next_support, inst.info.filter_state(t, k), t);
  p.z = sources(p.z_schema, inst.info.filter_state(t, k), t);
  return p;
}

void check_theta(const Instance& inst, int k, int t, const CompletePrescription& theta) {
  if (theta.owner != k || theta.time != t || theta.parts.size() != static_cast<size_t>(inst.agents()))
    throw Error(ErrorKind::SchemaMismatch, "complete prescription does not belong to agent " + std::to_string(k + 1) +
                                               " at t=" + std::to_string(t));
  for (int i = 0; i < inst.agents(); ++i)
    if (theta.parts[static_cast<size_t>(i)].domain != inst.info.prescription_domain(t, k, i))
      throw Error(ErrorKind::SchemaMismatch, "prescription for agent " + std::to_string(i + 1) + " has the wrong domain");
}

void check_state(const Instance& inst, int k, int t, const EqState& s) {
  if (s.values.size() != inst.info.filter_state(t, k).size() || s.x < 0 || s.x >= inst.system.state_size)
    throw Error(ErrorKind::SchemaMismatch, "equivalent-state realization does not match the schema");
}

std::vector<int> controls_from(const Instance& inst, const std::vector<std::vector<int>>& gamma_pos,
                               const std::vector<int>& values, const CompletePrescription& theta) {
  std::vector<int> u(static_cast<size_t>(inst.agents()));
  for (int i = 0; i < inst.agents(); ++i) {
    const Prescription& p = theta.parts[static_cast<size_t>(i)];
    size_t index = 0;
    const auto& pos = gamma_pos[static_cast<size_t>(i)];
    for (size_t n = 0; n < pos.size(); ++n)
      index = index * static_cast<size_t>(p.radices[n]) + static_cast<size_t>(values[static_cast<size_t>(pos[n])]);
    u[static_cast<size_t>(i)] = p.table[index];
  }
  return u;
}

std::vector<int> assemble(const std::vector<Source>& src, const std::vector<int>& old, const std::vector<int>& y,
                          const std::vector<int>& u) {
  std::vector<int> out;
  out.reserve(src.size());
  for (const Source& s : src) switch (s.from) {
      case Source::From::Old: out.push_back(old[static_cast<size_t>(s.index)]); break;
      case Source::From::FreshY: out.push_back(y[static_cast<size_t>(s.index)]); break;
      case Source::From::FreshU: out.push_back(u[static_cast<size_t>(s.index)]); break;
    }
  return out;
}

struct NextStep {
  int x;
  std::vector<int> y;
};

NextStep step(const Instance& inst, int t, int x, const std::vector<int>& u, int w, const std::vector<int>& v_next) {
  const SystemSpec& sys = inst.system;
  NextStep n;
  n.x = sys.transition[static_cast<size_t>(t)][static_cast<size_t>(x)][static_cast<size_t>(sys.joint_control_index(u))]
                      [static_cast<size_t>(w)];
  for (int j = 0; j < inst.agents(); ++j)
    n.y.push_back(sys.observation[static_cast<size_t>(j)][static_cast<size_t>(t + 1)][static_cast<size_t>(n.x)]
                                 [static_cast<size_t>(v_next[static_cast<size_t>(j)])]);
  return n;
}

struct Draw {
  std::vector<int> v;
  double p;
};

std::vector<Draw> joint_noise(const Instance& inst, int t) {
  std::vector<Draw> out{{{}, 1.0}};
  for (const PrimitiveSpec& n : inst.system.noises) {
    std::vector<Draw> next;
    for (const Draw& d : out)
      for (int v = 0; v < n.size; ++v) {
        const double q = n.at(t)[static_cast<size_t>(v)];
        if (q <= 0.0) continue;
        Draw e = d;
        e.v.push_back(v);
        e.p *= q;
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

size_t index_in(const std::vector<int>& radices, size_t offset, const std::vector<int>& values) {
  size_t index = 0;
  for (size_t n = 0; n < values.size(); ++n)
    index = index * static_cast<size_t>(radices[n + offset]) + static_cast<size_t>(values[n]);
  return index;
}

}  // namespace

InformationState make_information_state(const Instance& inst, int k, int t) {
  InformationState pi;
  pi.agent = k;
  pi.time = t;
  pi.support = inst.info.filter_state(t, k);
  pi.radices.push_back(inst.system.state_size);
  const Domain dom(pi.support, inst.card);
  pi.radices.insert(pi.radices.end(), dom.radices().begin(), dom.radices().end());
  pi.probs.assign(Domain(pi.radices).size(), 0.0);
  return pi;
}

EqState decode_state(const InformationState& pi, size_t index) {
  std::vector<int> all = Domain(pi.radices).decode(index);
  return {all.front(), std::vector<int>(all.begin() + 1, all.end())};
}

size_t encode_state(const InformationState& pi, const EqState& s) {
  return static_cast<size_t>(s.x) * Domain(std::vector<int>(pi.radices.begin() + 1, pi.radices.end())).size() +
         index_in(pi.radices, 1, s.values);
}

std::vector<int> prescribed_controls(const Instance& inst, int k, int t, const EqState& s, const CompletePrescription& theta) {
  check_theta(inst, k, t, theta);
  check_state(inst, k, t, s);
  return controls_from(inst, gamma_positions(inst, k, t), s.values, theta);
}

EqState hat_dynamics(const Instance& inst, int k, int t, const EqState& s, int w, const std::vector<int>& v_next,
                     const CompletePrescription& theta) {
  check_theta(inst, k, t, theta);
  check_state(inst, k, t, s);
  const StepPlan p = plan(inst, k, t);
  const std::vector<int> u = controls_from(inst, p.gamma_pos, s.values, theta);
  const NextStep n = step(inst, t, s.x, u, w, v_next);
  return {n.x, assemble(p.next, s.values, n.y, u)};
}

std::vector<int> hat_observation(const Instance& inst, int k, int t, const EqState& s, int w,
                                 const std::vector<int>& v_next, const CompletePrescription& theta) {
  check_theta(inst, k, t, theta);
  check_state(inst, k, t, s);
  const StepPlan p = plan(inst, k, t);
  const std::vector<int> u = controls_from(inst, p.gamma_pos, s.values, theta);
  const NextStep n = step(inst, t, s.x, u, w, v_next);
  return assemble(p.z, s.values, n.y, u);
}

double hat_cost(const Instance& inst, int k, int t, const EqState& s, const CompletePrescription& theta) {
  const std::vector<int> u = prescribed_controls(inst, k, t, s, theta);
  return inst.system.cost[static_cast<size_t>(t)][static_cast<size_t>(s.x)]
                         [static_cast<size_t>(inst.system.joint_control_index(u))];
}

std::map<size_t, InformationState> initial_information_state(const Instance& inst, int k) {
  const InfoSchema& e = inst.info.filter_state(0, k);
  const InfoSchema& a = inst.info.accessible(0, k);
  const Domain adom(a, inst.card);
  std::map<size_t, InformationState> out;
  for (int x = 0; x < inst.system.state_size; ++x) {
    const double px = inst.system.initial_probs[static_cast<size_t>(x)];
    if (px <= 0.0) continue;
    for (const Draw& d : joint_noise(inst, 0)) {
      std::vector<int> y;
      for (int j = 0; j < inst.agents(); ++j)
        y.push_back(inst.system.observation[static_cast<size_t>(j)][0][static_cast<size_t>(x)]
                                           [static_cast<size_t>(d.v[static_cast<size_t>(j)])]);
      auto value_of = [&](const InfoSchema& s) {
        std::vector<int> vals;
        for (const VariableId& v : s) vals.push_back(y[static_cast<size_t>(v.agent)]);
        return vals;
      };
      const size_t ai = adom.encode(value_of(a));
      auto it = out.find(ai);
      if (it == out.end()) it = out.emplace(ai, make_information_state(inst, k, 0)).first;
      InformationState& pi = it->second;
      pi.probs[encode_state(pi, {x, value_of(e)})] += px * d.p;
    }
  }
  for (auto& [ai, pi] : out) {
    double z = 0.0;
    for (double q : pi.probs) z += q;
    for (double& q : pi.probs) q /= z;
  }
  return out;
}

std::map<size_t, Branch> branch(const Instance& inst, const InformationState& pi, const CompletePrescription& theta) {
  const int k = pi.agent;
  const int t = pi.time;
  check_theta(inst, k, t, theta);
  const StepPlan p = plan(inst, k, t);
  const Domain zdom(p.z_schema, inst.card);
  const auto noise = joint_noise(inst, t + 1);
  const std::vector<double>& pw = inst.system.disturbance.at(t);
  const Domain all(pi.radices);

  std::map<size_t, Branch> out;
  for (size_t si = 0; si < pi.probs.size(); ++si) {
    const double ps = pi.probs[si];
    if (ps <= 0.0) continue;
    const EqState s = decode_state(pi, si);
    const std::vector<int> u = controls_from(inst, p.gamma_pos, s.values, theta);
    for (int w = 0; w < inst.system.disturbance.size; ++w) {
      if (pw[static_cast<size_t>(w)] <= 0.0) continue;
      for (const Draw& d : noise) {
        const NextStep n = step(inst, t, s.x, u, w, d.v);
        std::vector<int> z = assemble(p.z, s.values, n.y, u);
        const size_t zi = zdom.encode(z);
        auto it = out.find(zi);
        if (it == out.end()) {
          Branch b;
          b.z = std::move(z);
          b.next = make_information_state(inst, k, t + 1);
          it = out.emplace(zi, std::move(b)).first;
        }
        Branch& b = it->second;
        const double q = ps * pw[static_cast<size_t>(w)] * d.p;
        b.prob += q;
        b.next.probs[encode_state(b.next, {n.x, assemble(p.next, s.values, n.y, u)})] += q;
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.prob <= kImpossible) {
      it = out.erase(it);
      continue;
    }
    for (double& q : it->second.next.probs) q /= it->second.prob;
    ++it;
  }
  return out;
}

InformationState update_information_state(const Instance& inst, const InformationState& pi,
                                          const CompletePrescription& theta, const std::vector<int>& z) {
  const Domain zdom(inst.info.new_info(pi.time + 1, pi.agent), inst.card);
  const size_t zi = zdom.encode(z);
  auto branches = branch(inst, pi, theta);
  auto it = branches.find(zi);
  if (it == branches.end())
    throw Error(ErrorKind::ImpossibleObservation, "new information has probability 0 under the current belief");
  return std::move(it->second.next);
}

double expected_stage_cost(const Instance& inst, const InformationState& pi, const CompletePrescription& theta) {
  check_theta(inst, pi.agent, pi.time, theta);
  const auto gpos = gamma_positions(inst, pi.agent, pi.time);
  double c = 0.0;
  for (size_t si = 0; si < pi.probs.size(); ++si) {
    if (pi.probs[si] <= 0.0) continue;
    const EqState s = decode_state(pi, si);
    const std::vector<int> u = controls_from(inst, gpos, s.values, theta);
    c += pi.probs[si] * inst.system.cost[static_cast<size_t>(pi.time)][static_cast<size_t>(s.x)]
                                        [static_cast<size_t>(inst.system.joint_control_index(u))];
  }
  return c;
}

ConnectionTerm connection_term(const Instance& inst, const InformationState& pi_i, int k) {
  const int i = pi_i.agent;
  const int t = pi_i.time;
  if (k >= i) throw Error(ErrorKind::IndexOrder, "connection term needs k < i");
  ConnectionTerm lam;
  lam.lower = k;
  lam.higher = i;
  lam.time = t;
  lam.support = schema_difference(inst.info.accessible(t, k), inst.info.accessible(t, i));
  const std::vector<int> pos = positions_in(lam.support, pi_i.support);
  lam.radices = Domain(lam.support, inst.card).radices();
  lam.probs.assign(Domain(lam.radices).size(), 0.0);
  const Domain ldom(lam.radices);
  for (size_t si = 0; si < pi_i.probs.size(); ++si) {
    if (pi_i.probs[si] == 0.0) continue;
    const EqState s = decode_state(pi_i, si);
    std::vector<int> vals;
    for (int p : pos) vals.push_back(s.values[static_cast<size_t>(p)]);
    lam.probs[ldom.encode(vals)] += pi_i.probs[si];
  }
  return lam;
}

InformationState condition_to_lower(const Instance& inst, const InformationState& pi_i, int k,
                                    const std::vector<int>& extra_values) {
  const int t = pi_i.time;
  const InfoSchema extra = schema_difference(inst.info.accessible(t, k), inst.info.accessible(t, pi_i.agent));
  if (extra.size() != extra_values.size()) throw Error(ErrorKind::SchemaMismatch, "wrong number of conditioning values");
  const std::vector<int> epos = positions_in(extra, pi_i.support);
  InformationState out = make_information_state(inst, k, t);
  const std::vector<int> kpos = positions_in(out.support, pi_i.support);
  double mass = 0.0;
  for (size_t si = 0; si < pi_i.probs.size(); ++si) {
    if (pi_i.probs[si] == 0.0) continue;
    const EqState s = decode_state(pi_i, si);
    bool match = true;
    for (size_t n = 0; n < epos.size() && match; ++n) match = s.values[static_cast<size_t>(epos[n])] == extra_values[n];
    if (!match) continue;
    EqState sk{s.x, {}};
    for (int p : kpos) sk.values.push_back(s.values[static_cast<size_t>(p)]);
    out.probs[encode_state(out, sk)] += pi_i.probs[si];
    mass += pi_i.probs[si];
  }
  if (mass <= kImpossible) throw Error(ErrorKind::ZeroProbabilityCondition, "conditioning values have probability 0");
  for (double& q : out.probs) q /= mass;
  return out;
}

double factorization_check(const Instance& inst, const InformationState& pi_i, const std::vector<int>& a_i_values,
                           const ConnectionTerm& lambda, const std::map<size_t, InformationState>& pi_k_by_accessible) {
  const int t = pi_i.time;
  const int k = lambda.lower;
  const InfoSchema& ai = inst.info.accessible(t, pi_i.agent);
  const InfoSchema& ak = inst.info.accessible(t, k);
  const std::vector<int> lpos = positions_in(lambda.support, pi_i.support);
  const std::vector<int> kpos = positions_in(inst.info.filter_state(t, k), pi_i.support);
  const std::vector<int> ai_in_ak = positions_in(ai, ak);
  const std::vector<int> l_in_ak = positions_in(lambda.support, ak);
  const Domain akdom(ak, inst.card);
  const Domain ldom(lambda.radices);

  double worst = 0.0;
  for (size_t si = 0; si < pi_i.probs.size(); ++si) {
    const EqState s = decode_state(pi_i, si);
    std::vector<int> lv;
    for (int p : lpos) lv.push_back(s.values[static_cast<size_t>(p)]);
    const double lam = lambda.probs[ldom.encode(lv)];
    double rhs = 0.0;
    if (lam > 0.0) {
      std::vector<int> akv(ak.size());
      for (size_t n = 0; n < ai_in_ak.size(); ++n) akv[static_cast<size_t>(ai_in_ak[n])] = a_i_values[n];
      for (size_t n = 0; n < l_in_ak.size(); ++n) akv[static_cast<size_t>(l_in_ak[n])] = lv[n];
      auto it = pi_k_by_accessible.find(akdom.encode(akv));
      if (it == pi_k_by_accessible.end())
        throw Error(ErrorKind::MissingConditional, "no lower-agent belief for an accessible realization with positive weight");
      EqState sk{s.x, {}};
      for (int p : kpos) sk.values.push_back(s.values[static_cast<size_t>(p)]);
      rhs = it->second.probs[encode_state(it->second, sk)] * lam;
    }
    worst = std::max(worst, std::abs(pi_i.probs[si] - rhs));
  }
  return worst;
}

std::vector<int64_t> belief_key(const InformationState& pi) {
  std::vector<int64_t> key;
  key.reserve(pi.probs.size() + 2);
  key.push_back(pi.agent);
  key.push_back(pi.time);
  for (double q : pi.probs) key.push_back(static_cast<int64_t>(std::llround(q * 1e12)));
  return key;
}

std::vector<int> extend_accessible(const Instance& inst, int k, int t, const std::vector<int>& a_t,
                                   const std::vector<int>& z_next) {
  const InfoSchema& a1 = inst.info.accessible(t + 1, k);
  std::vector<int> out(a1.size(), -1);
  const std::vector<int> p0 = positions_in(inst.info.accessible(t, k), a1);
  const std::vector<int> pz = positions_in(inst.info.new_info(t + 1, k), a1);
  for (size_t n = 0; n < p0.size(); ++n) out[static_cast<size_t>(p0[n])] = a_t[n];
  for (size_t n = 0; n < pz.size(); ++n) out[static_cast<size_t>(pz[n])] = z_next[n];
  return out;
}

BeliefTrace beliefs_under_strategy(const Instance& inst, const ControlStrategy& g, int k) {
  const PrescriptionStrategy psi = control_law_to_strategy(inst, g, k);
  BeliefTrace trace;
  const auto init = initial_information_state(inst, k);
  const Domain a0(inst.info.accessible(0, k), inst.card);
  std::map<size_t, double> p0;
  {
    // Probability of each time-0 accessible realization.
    const Layer layer = initial_layer(inst);
    const VariableLayout lay(inst.agents(), inst.horizon());
    const auto slots = lay.slots(inst.info.accessible(0, k));
    for (const auto& [h, p] : layer) p0[project(h, slots, a0)] += p;
  }
  trace.states.push_back(init);
  trace.probs.push_back(p0);
  for (int t = 0; t < inst.horizon(); ++t) {
    const Domain at(inst.info.accessible(t, k), inst.card);
    const Domain an(inst.info.accessible(t + 1, k), inst.card);
    std::map<size_t, InformationState> next;
    std::map<size_t, double> nextp;
    for (const auto& [ai, pi] : trace.states.back()) {
      const std::vector<int> av = at.decode(ai);
      const double pa = trace.probs.back().at(ai);
      const CompletePrescription theta = psi.complete(inst, t, av);
      for (auto& [zi, b] : branch(inst, pi, theta)) {
        const size_t ni = an.encode(extend_accessible(inst, k, t, av, b.z));
        nextp[ni] += pa * b.prob;
        next.emplace(ni, std::move(b.next));
      }
    }
    trace.states.push_back(std::move(next));
    trace.probs.push_back(std::move(nextp));
  }
  return trace;
}

}  // namespace wom
