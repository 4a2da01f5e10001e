#include <chrono>

#include "wom/error.hpp"
#include "wom/solver.hpp"

namespace wom {

namespace {

constexpr double kTie = 1e-12;

// Dynamic program of the highest-indexed agent over its reachable beliefs.
// Complete prescriptions are enumerated with the first target most
// significant; at the final time the last target's table is minimized entry
// by entry.
class CommonInfoDp {
 public:
  struct Node {
    double value = 0.0;
    std::vector<std::vector<int>> tables;  // per target
  };

  CommonInfoDp(const Instance& inst, uint64_t cap) : inst_(inst), owner_(inst.agents() - 1), cap_(cap) {}

  const Node& solve(const InformationState& pi) {
    auto key = belief_key(pi);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Node node = pi.time == inst_.horizon() ? solve_final(pi) : solve_stage(pi);
    return memo_.emplace(std::move(key), std::move(node)).first->second;
  }

  CompletePrescription theta(int t, const std::vector<std::vector<int>>& tables) const {
    CompletePrescription th;
    th.owner = owner_;
    th.time = t;
    for (int i = 0; i < inst_.agents(); ++i)
      th.parts.push_back(make_prescription(inst_, owner_, i, t, tables[static_cast<size_t>(i)]));
    return th;
  }

  uint64_t work() const { return work_; }

 private:
  void tick() {
    if (++work_ > cap_)
      throw Error(ErrorKind::CapExceeded, "common-information DP exceeded the work cap of " + std::to_string(cap_));
  }

  std::vector<size_t> domain_sizes(int t) const {
    std::vector<size_t> out;
    for (int i = 0; i < inst_.agents(); ++i) out.push_back(Domain(inst_.info.prescription_domain(t, owner_, i), inst_.card).size());
    return out;
  }

  // Table entries of each target that some positive-probability state reaches.
  // The others never influence cost or belief and stay 0, which is also what
  // the lexicographic tie-break would pick.
  std::vector<std::vector<size_t>> used_entries(const InformationState& pi) const {
    const int t = pi.time;
    std::vector<std::vector<size_t>> used;
    for (int i = 0; i < inst_.agents(); ++i) {
      const InfoSchema& d = inst_.info.prescription_domain(t, owner_, i);
      const std::vector<int> pos = positions_in(d, pi.support);
      const Domain dom(d, inst_.card);
      std::vector<char> hit(dom.size(), 0);
      for (size_t si = 0; si < pi.probs.size(); ++si) {
        if (pi.probs[si] <= 0.0) continue;
        const EqState s = decode_state(pi, si);
        std::vector<int> v;
        for (int q : pos) v.push_back(s.values[static_cast<size_t>(q)]);
        hit[dom.encode(v)] = 1;
      }
      std::vector<size_t> u;
      for (size_t e = 0; e < hit.size(); ++e)
        if (hit[e]) u.push_back(e);
      used.push_back(std::move(u));
    }
    return used;
  }

  // Odometer over the reached entries of targets [0, upto), first target most
  // significant.
  template <class Visit>
  void for_each_combo(const InformationState& pi, int upto, Visit&& visit) {
    const std::vector<size_t> sizes = domain_sizes(pi.time);
    const std::vector<std::vector<size_t>> used = used_entries(pi);
    std::vector<std::vector<int>> tables;
    for (int i = 0; i < inst_.agents(); ++i) tables.emplace_back(sizes[static_cast<size_t>(i)], 0);
    while (true) {
      tick();
      visit(tables);
      int i = upto - 1;
      bool done = true;
      while (i >= 0 && done) {
        auto& tab = tables[static_cast<size_t>(i)];
        const auto& entries = used[static_cast<size_t>(i)];
        const int U = inst_.card.control[static_cast<size_t>(i)];
        for (size_t n = entries.size(); n-- > 0;) {
          if (++tab[entries[n]] < U) {
            done = false;
            break;
          }
          tab[entries[n]] = 0;
        }
        if (done) --i;
      }
      if (done) return;
    }
  }

  Node solve_stage(const InformationState& pi) {
    const int t = pi.time;
    Node best;
    bool found = false;
    for_each_combo(pi, inst_.agents(), [&](const std::vector<std::vector<int>>& tables) {
      const CompletePrescription th = theta(t, tables);
      double v = expected_stage_cost(inst_, pi, th);
      for (const auto& [zi, b] : branch(inst_, pi, th)) v += b.prob * solve(b.next).value;
      if (!found || v < best.value - kTie) {
        found = true;
        best.value = v;
        best.tables = tables;
      }
    });
    return best;
  }

  Node solve_final(const InformationState& pi) {
    const int t = pi.time;
    const int last = owner_;
    const SystemSpec& sys = inst_.system;
    std::vector<std::vector<int>> pos;
    for (int i = 0; i < inst_.agents(); ++i)
      pos.push_back(positions_in(inst_.info.prescription_domain(t, owner_, i), pi.support));
    struct Point {
      int x;
      double p;
      std::vector<size_t> entry;  // per target
    };
    std::vector<Point> points;
    for (size_t si = 0; si < pi.probs.size(); ++si) {
      if (pi.probs[si] <= 0.0) continue;
      const EqState s = decode_state(pi, si);
      Point pt{s.x, pi.probs[si], {}};
      for (int i = 0; i < inst_.agents(); ++i) {
        const Domain d(inst_.info.prescription_domain(t, owner_, i), inst_.card);
        std::vector<int> v;
        for (int p : pos[static_cast<size_t>(i)]) v.push_back(s.values[static_cast<size_t>(p)]);
        pt.entry.push_back(d.encode(v));
      }
      points.push_back(std::move(pt));
    }
    const int U = inst_.card.control[static_cast<size_t>(last)];
    const size_t last_size = Domain(inst_.info.prescription_domain(t, owner_, last), inst_.card).size();
    Node best;
    bool found = false;
    std::vector<int> u(static_cast<size_t>(inst_.agents()));
    for_each_combo(pi, last, [&](const std::vector<std::vector<int>>& tables) {
      std::vector<double> acc(last_size * static_cast<size_t>(U), 0.0);
      for (const Point& pt : points) {
        for (int i = 0; i < last; ++i) u[static_cast<size_t>(i)] = tables[static_cast<size_t>(i)][pt.entry[static_cast<size_t>(i)]];
        for (int a = 0; a < U; ++a) {
          u[static_cast<size_t>(last)] = a;
          acc[pt.entry[static_cast<size_t>(last)] * static_cast<size_t>(U) + static_cast<size_t>(a)] +=
              pt.p * sys.cost[static_cast<size_t>(t)][static_cast<size_t>(pt.x)][static_cast<size_t>(sys.joint_control_index(u))];
        }
      }
      std::vector<int> own(last_size, 0);
      double v = 0.0;
      for (size_t e = 0; e < last_size; ++e) {
        int arg = 0;
        for (int a = 1; a < U; ++a)
          if (acc[e * static_cast<size_t>(U) + static_cast<size_t>(a)] < acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)] - kTie)
            arg = a;
        own[e] = arg;
        v += acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)];
      }
      if (!found || v < best.value - kTie) {
        found = true;
        best.value = v;
        best.tables = tables;
        best.tables[static_cast<size_t>(last)] = std::move(own);
      }
    });
    return best;
  }

  const Instance& inst_;
  int owner_;
  uint64_t cap_;
  uint64_t work_ = 0;
  std::map<std::vector<int64_t>, Node> memo_;
};

PrescriptionStrategy empty_strategy(const Instance& inst, int owner) {
  PrescriptionStrategy psi;
  psi.owner = owner;
  psi.laws.resize(static_cast<size_t>(inst.horizon() + 1));
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int i = 0; i < inst.agents(); ++i) {
      PrescriptionLaw law;
      law.target = i;
      law.conditioning = inst.info.conditioning(t, owner, i);
      law.domain = inst.info.prescription_domain(t, owner, i);
      law.tables.assign(Domain(law.conditioning, inst.card).size(),
                        std::vector<int>(Domain(law.domain, inst.card).size(), 0));
      psi.laws[static_cast<size_t>(t)].push_back(std::move(law));
    }
  return psi;
}

}  // namespace

std::map<size_t, double> initial_accessible_probs(const Instance& inst, int k) {
  const VariableLayout lay(inst.agents(), inst.horizon());
  const auto slots = lay.slots(inst.info.accessible(0, k));
  const Domain dom(inst.info.accessible(0, k), inst.card);
  std::map<size_t, double> out;
  for (const auto& [h, p] : initial_layer(inst)) out[project(h, slots, dom)] += p;
  return out;
}

SolveResult solve_common_info_dp(const Instance& inst, const SolverOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const int owner = inst.agents() - 1;
  const int T = inst.horizon();
  CommonInfoDp dp(inst, opt.cap);

  SolveResult r;
  r.method = "common-info";
  r.agent = owner;
  PrescriptionStrategy psi = empty_strategy(inst, owner);
  r.tuple_keys.assign(static_cast<size_t>(T + 1), std::vector<std::map<size_t, std::vector<int64_t>>>(static_cast<size_t>(inst.agents())));

  std::map<size_t, InformationState> states = initial_information_state(inst, owner);
  const auto p0 = initial_accessible_probs(inst, owner);
  for (const auto& [ai, pi] : states) r.search_value += p0.at(ai) * dp.solve(pi).value;

  for (int t = 0; t <= T; ++t) {
    const Domain at(inst.info.accessible(t, owner), inst.card);
    const Domain an = t < T ? Domain(inst.info.accessible(t + 1, owner), inst.card) : Domain();
    std::map<size_t, InformationState> next;
    for (const auto& [ai, pi] : states) {
      const auto& node = dp.solve(pi);
      for (int i = 0; i < inst.agents(); ++i)
        psi.laws[static_cast<size_t>(t)][static_cast<size_t>(i)].tables[ai] = node.tables[static_cast<size_t>(i)];
      r.tuple_keys[static_cast<size_t>(t)][static_cast<size_t>(owner)][ai] = belief_key(pi);
      if (t == T) continue;
      const std::vector<int> av = at.decode(ai);
      for (auto& [zi, b] : branch(inst, pi, dp.theta(t, node.tables)))
        next.emplace(an.encode(extend_accessible(inst, owner, t, av, b.z)), std::move(b.next));
    }
    r.beliefs.push_back(std::move(states));
    states = std::move(next);
  }

  r.strategy = strategy_to_control(inst, psi);
  r.prescription = std::move(psi);
  r.optimal_cost = exact_strategy_cost(inst, r.strategy).expected_cost;
  r.search_size = count_strategies(inst, {CountMode::Kind::Agent, owner});
  r.evaluated = dp.work();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CostReport evaluate_prescription_strategy(const Instance& inst, const PrescriptionStrategy& psi) {
  return exact_strategy_cost(inst, strategy_to_control(inst, psi));
}

}  // namespace wom
