#include <algorithm>
#include <chrono>

#include "wom/error.hpp"
#include "wom/solver.hpp"

namespace wom {

namespace {

constexpr double kTie = 1e-12;

// Agent k's decomposition, solved over beliefs of the highest-indexed agent.
// At a belief node the decisions are arranged in levels: the level of agent
// l > k holds agent l's prescription, one table per class of realizations of
// the variables agent l accesses beyond the common ones; level k holds the
// prescriptions of agents 1..k. Classes nest from level K down to level k.
// With belief keying two realizations share a class when they induce the
// same belief of that level's agent (and share the enclosing class); with
// realization keying every realization is its own class.
class PrescriptionSearch {
 public:
  enum class Keying { Belief, Realization };

  struct Layout {
    int t = 0;
    int levels = 0;
    std::vector<int> x;
    std::vector<double> p;
    std::vector<std::vector<int>> values;
    std::vector<std::vector<int>> cls;                         // [L][point]
    std::vector<int> class_count;                              // [L]
    std::vector<std::vector<int>> parent;                      // [L][class]
    std::vector<std::vector<std::vector<int>>> children;       // [L][class]
    std::vector<std::vector<std::vector<int64_t>>> chain_key;  // [L][class]
    std::vector<std::map<size_t, int>> subgroup_class;         // [L] subgroup index -> class
    std::vector<std::vector<int>> agents_at;                   // [L]
    std::vector<int> level_of;                                 // per agent
    std::vector<std::vector<size_t>> entry;                    // [agent][point]
    std::vector<size_t> dom_size;                              // per agent
    std::vector<std::vector<int>> slot_base;                   // [L][class] -> first slot
    std::vector<int> slot_agent;                               // per slot
    std::vector<std::vector<size_t>> used;                     // per slot, reached entries
    int slot_of(int L, int c, int agent) const {
      const auto& ag = agents_at[static_cast<size_t>(L)];
      int off = 0;
      while (ag[static_cast<size_t>(off)] != agent) ++off;
      return slot_base[static_cast<size_t>(L)][static_cast<size_t>(c)] + off;
    }
  };

  struct Node {
    double value = 0.0;
    std::vector<std::vector<int>> tables;  // per slot
  };

  PrescriptionSearch(const Instance& inst, int k, Keying keying, uint64_t cap)
      : inst_(inst), k_(k), top_(inst.agents() - 1), keying_(keying), cap_(cap) {}

  int level_value(int L) const { return top_ - L; }

  Layout layout(const InformationState& pi) const {
    const int t = pi.time;
    Layout lay;
    lay.t = t;
    lay.levels = top_ - k_ + 1;
    for (size_t si = 0; si < pi.probs.size(); ++si) {
      if (pi.probs[si] <= 0.0) continue;
      EqState s = decode_state(pi, si);
      lay.x.push_back(s.x);
      lay.p.push_back(pi.probs[si]);
      lay.values.push_back(std::move(s.values));
    }
    const size_t P = lay.p.size();
    lay.cls.resize(static_cast<size_t>(lay.levels));
    lay.class_count.resize(static_cast<size_t>(lay.levels));
    lay.parent.resize(static_cast<size_t>(lay.levels));
    lay.children.resize(static_cast<size_t>(lay.levels));
    lay.chain_key.resize(static_cast<size_t>(lay.levels));
    lay.subgroup_class.resize(static_cast<size_t>(lay.levels));
    const std::vector<int64_t> top_key = belief_key(pi);
    for (int L = 0; L < lay.levels; ++L) {
      const int lev = level_value(L);
      const InfoSchema extra = schema_difference(inst_.info.accessible(t, lev), inst_.info.accessible(t, top_));
      const std::vector<int> pos = positions_in(extra, pi.support);
      const Domain edom(extra, inst_.card);
      std::map<std::vector<int64_t>, int> ids;
      auto& cls = lay.cls[static_cast<size_t>(L)];
      cls.assign(P, 0);
      for (size_t n = 0; n < P; ++n) {
        std::vector<int> ev;
        for (int q : pos) ev.push_back(lay.values[n][static_cast<size_t>(q)]);
        const size_t sg = edom.encode(ev);
        auto& sc = lay.subgroup_class[static_cast<size_t>(L)];
        if (auto it = sc.find(sg); it != sc.end()) {
          cls[n] = it->second;
          continue;
        }
        const int par = L == 0 ? -1 : lay.cls[static_cast<size_t>(L - 1)][n];
        std::vector<int64_t> own;
        if (L == 0)
          own = top_key;
        else if (keying_ == Keying::Belief)
          own = belief_key(condition_to_lower(inst_, pi, lev, ev));
        else
          own = {static_cast<int64_t>(sg)};
        std::vector<int64_t> key = own;
        key.push_back(par);
        auto [it, fresh] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
        if (fresh) {
          lay.parent[static_cast<size_t>(L)].push_back(par);
          lay.children[static_cast<size_t>(L)].emplace_back();
          if (L > 0) lay.children[static_cast<size_t>(L - 1)][static_cast<size_t>(par)].push_back(it->second);
          std::vector<int64_t> chain = L == 0 ? std::vector<int64_t>{} : lay.chain_key[static_cast<size_t>(L - 1)][static_cast<size_t>(par)];
          // Chain order: own level first, enclosing levels after.
          chain.insert(chain.begin(), own.begin(), own.end());
          chain.insert(chain.begin() + static_cast<long>(own.size()), -1);
          lay.chain_key[static_cast<size_t>(L)].push_back(std::move(chain));
        }
        sc.emplace(sg, it->second);
        cls[n] = it->second;
      }
      lay.class_count[static_cast<size_t>(L)] = static_cast<int>(ids.size());
    }

    lay.agents_at.resize(static_cast<size_t>(lay.levels));
    lay.level_of.assign(static_cast<size_t>(inst_.agents()), 0);
    for (int i = 0; i < inst_.agents(); ++i) {
      const int L = i <= k_ ? lay.levels - 1 : top_ - i;
      lay.level_of[static_cast<size_t>(i)] = L;
      lay.agents_at[static_cast<size_t>(L)].push_back(i);
    }
    lay.entry.resize(static_cast<size_t>(inst_.agents()));
    for (int i = 0; i < inst_.agents(); ++i) {
      const InfoSchema& d = inst_.info.prescription_domain(t, k_, i);
      const std::vector<int> pos = positions_in(d, pi.support);
      const Domain dom(d, inst_.card);
      lay.dom_size.push_back(dom.size());
      for (size_t n = 0; n < P; ++n) {
        std::vector<int> v;
        for (int q : pos) v.push_back(lay.values[n][static_cast<size_t>(q)]);
        lay.entry[static_cast<size_t>(i)].push_back(dom.encode(v));
      }
    }
    lay.slot_base.resize(static_cast<size_t>(lay.levels));
    int slot = 0;
    for (int L = 0; L < lay.levels; ++L)
      for (int c = 0; c < lay.class_count[static_cast<size_t>(L)]; ++c) {
        lay.slot_base[static_cast<size_t>(L)].push_back(slot);
        for (int i : lay.agents_at[static_cast<size_t>(L)]) {
          lay.slot_agent.push_back(i);
          ++slot;
        }
      }
    // Entries no positive-probability point reaches cannot affect anything;
    // they stay 0, the choice the lexicographic tie-break would make anyway.
    lay.used.resize(lay.slot_agent.size());
    for (int i = 0; i < inst_.agents(); ++i) {
      const int L = lay.level_of[static_cast<size_t>(i)];
      for (size_t n = 0; n < P; ++n)
        lay.used[static_cast<size_t>(lay.slot_of(L, lay.cls[static_cast<size_t>(L)][n], i))].push_back(lay.entry[static_cast<size_t>(i)][n]);
    }
    for (auto& u : lay.used) {
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
    }
    return lay;
  }

  int control_of(const Layout& lay, const std::vector<std::vector<int>>& tables, int i, size_t n) const {
    const int L = lay.level_of[static_cast<size_t>(i)];
    const int s = lay.slot_of(L, lay.cls[static_cast<size_t>(L)][n], i);
    return tables[static_cast<size_t>(s)][lay.entry[static_cast<size_t>(i)][n]];
  }

  /// The equivalent complete prescription of the highest-indexed agent.
  CompletePrescription effective(const InformationState& pi, const Layout& lay,
                                 const std::vector<std::vector<int>>& tables) const {
    const int t = lay.t;
    CompletePrescription th;
    th.owner = top_;
    th.time = t;
    for (int i = 0; i < inst_.agents(); ++i) {
      const InfoSchema& d = inst_.info.prescription_domain(t, top_, i);
      const std::vector<int> pos = positions_in(d, pi.support);
      const Domain dom(d, inst_.card);
      std::vector<int> tab(dom.size(), 0);
      for (size_t n = 0; n < lay.p.size(); ++n) {
        std::vector<int> v;
        for (int q : pos) v.push_back(lay.values[n][static_cast<size_t>(q)]);
        tab[dom.encode(v)] = control_of(lay, tables, i, n);
      }
      th.parts.push_back(make_prescription(inst_, top_, i, t, std::move(tab)));
    }
    return th;
  }

  const Node& solve(const InformationState& pi) {
    auto key = belief_key(pi);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Layout lay = layout(pi);
    Node node;
    node.tables.reserve(lay.slot_agent.size());
    for (int i : lay.slot_agent) node.tables.emplace_back(lay.dom_size[static_cast<size_t>(i)], 0);
    if (pi.time == inst_.horizon())
      node.value = nested(lay, 0, 0, node.tables);
    else
      solve_stage(pi, lay, node);
    return memo_.emplace(std::move(key), std::move(node)).first->second;
  }

  uint64_t work() const { return work_; }

 private:
  void tick() {
    if (++work_ > cap_)
      throw Error(ErrorKind::CapExceeded, "prescription search for agent " + std::to_string(k_ + 1) +
                                              " exceeded the work cap of " + std::to_string(cap_));
  }

  // Advances an odometer over the listed slots (first slot most significant).
  bool next_combo(const Layout& lay, std::vector<std::vector<int>>& tables, const std::vector<int>& slots) const {
    for (size_t n = slots.size(); n-- > 0;) {
      auto& tab = tables[static_cast<size_t>(slots[n])];
      const auto& entries = lay.used[static_cast<size_t>(slots[n])];
      const int U = inst_.card.control[static_cast<size_t>(lay.slot_agent[static_cast<size_t>(slots[n])])];
      for (size_t e = entries.size(); e-- > 0;) {
        if (++tab[entries[e]] < U) return true;
        tab[entries[e]] = 0;
      }
    }
    return false;
  }

  double stage_cost(const Layout& lay, const std::vector<std::vector<int>>& tables) const {
    const SystemSpec& sys = inst_.system;
    std::vector<int> u(static_cast<size_t>(inst_.agents()));
    double c = 0.0;
    for (size_t n = 0; n < lay.p.size(); ++n) {
      for (int i = 0; i < inst_.agents(); ++i) u[static_cast<size_t>(i)] = control_of(lay, tables, i, n);
      c += lay.p[n] * sys.cost[static_cast<size_t>(lay.t)][static_cast<size_t>(lay.x[n])][static_cast<size_t>(sys.joint_control_index(u))];
    }
    return c;
  }

  void solve_stage(const InformationState& pi, const Layout& lay, Node& node) {
    std::vector<int> all(lay.slot_agent.size());
    for (size_t s = 0; s < all.size(); ++s) all[s] = static_cast<int>(s);
    std::vector<std::vector<int>> tables = node.tables;
    bool found = false;
    do {
      tick();
      double v = stage_cost(lay, tables);
      for (const auto& [zi, b] : branch(inst_, pi, effective(pi, lay, tables))) v += b.prob * solve(b.next).value;
      if (!found || v < node.value - kTie) {
        found = true;
        node.value = v;
        node.tables = tables;
      }
    } while (next_combo(lay, tables, all));
  }

  // Final time: the cost splits over classes, so each class is optimized
  // given the enclosing choices. Writes the optimal tables of class c and of
  // everything nested in it.
  double nested(const Layout& lay, int L, int c, std::vector<std::vector<int>>& tables) {
    const bool leaf = L == lay.levels - 1;
    std::vector<int> slots;
    for (int i : lay.agents_at[static_cast<size_t>(L)]) slots.push_back(lay.slot_of(L, c, i));
    int own = -1;
    if (leaf) {
      own = slots.back();  // agent k itself, chosen entry by entry
      slots.pop_back();
    }
    for (int s : slots) std::fill(tables[static_cast<size_t>(s)].begin(), tables[static_cast<size_t>(s)].end(), 0);
    double best = 0.0;
    bool found = false;
    std::vector<std::vector<int>> best_tabs;
    do {
      tick();
      double v = 0.0;
      if (leaf) {
        v = leaf_cost(lay, c, tables, own);
      } else {
        for (int ch : lay.children[static_cast<size_t>(L)][static_cast<size_t>(c)]) v += nested(lay, L + 1, ch, tables);
      }
      if (!found || v < best - kTie) {
        found = true;
        best = v;
        best_tabs.clear();
        for (int s : slots) best_tabs.push_back(tables[static_cast<size_t>(s)]);
        if (leaf) best_tabs.push_back(tables[static_cast<size_t>(own)]);
      }
    } while (next_combo(lay, tables, slots));
    for (size_t n = 0; n < slots.size(); ++n) tables[static_cast<size_t>(slots[n])] = best_tabs[n];
    if (leaf)
      tables[static_cast<size_t>(own)] = best_tabs.back();
    else
      for (int ch : lay.children[static_cast<size_t>(L)][static_cast<size_t>(c)]) nested(lay, L + 1, ch, tables);
    return best;
  }

  double leaf_cost(const Layout& lay, int c, std::vector<std::vector<int>>& tables, int own) const {
    const SystemSpec& sys = inst_.system;
    const int L = lay.levels - 1;
    const int U = inst_.card.control[static_cast<size_t>(k_)];
    const size_t D = lay.dom_size[static_cast<size_t>(k_)];
    std::vector<double> acc(D * static_cast<size_t>(U), 0.0);
    std::vector<char> used(D, 0);
    std::vector<int> u(static_cast<size_t>(inst_.agents()));
    for (size_t n = 0; n < lay.p.size(); ++n) {
      if (lay.cls[static_cast<size_t>(L)][n] != c) continue;
      for (int i = 0; i < inst_.agents(); ++i)
        if (i != k_) u[static_cast<size_t>(i)] = control_of(lay, tables, i, n);
      const size_t e = lay.entry[static_cast<size_t>(k_)][n];
      used[e] = 1;
      for (int a = 0; a < U; ++a) {
        u[static_cast<size_t>(k_)] = a;
        acc[e * static_cast<size_t>(U) + static_cast<size_t>(a)] +=
            lay.p[n] * sys.cost[static_cast<size_t>(lay.t)][static_cast<size_t>(lay.x[n])][static_cast<size_t>(sys.joint_control_index(u))];
      }
    }
    auto& tab = tables[static_cast<size_t>(own)];
    double v = 0.0;
    for (size_t e = 0; e < D; ++e) {
      int arg = 0;
      if (used[e])
        for (int a = 1; a < U; ++a)
          if (acc[e * static_cast<size_t>(U) + static_cast<size_t>(a)] < acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)] - kTie)
            arg = a;
      tab[e] = arg;
      v += acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)];
    }
    return v;
  }

  const Instance& inst_;
  int k_;
  int top_;
  Keying keying_;
  uint64_t cap_;
  uint64_t work_ = 0;
  std::map<std::vector<int64_t>, Node> memo_;
};

PrescriptionStrategy zero_prescription_strategy(const Instance& inst, int owner) {
  PrescriptionStrategy psi;
  psi.owner = owner;
  psi.laws.resize(static_cast<size_t>(inst.horizon() + 1));
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int i = 0; i < inst.agents(); ++i) {
      PrescriptionLaw law;
      law.target = i;
      law.conditioning = inst.info.conditioning(t, owner, i);
      law.domain = inst.info.prescription_domain(t, owner, i);
      law.tables.assign(Domain(law.conditioning, inst.card).size(), std::vector<int>(Domain(law.domain, inst.card).size(), 0));
      psi.laws[static_cast<size_t>(t)].push_back(std::move(law));
    }
  return psi;
}

// Tail prescriptions that a per-realization minimization picked, keyed by
// (target, conditioning realization); used to spot disagreements.
using TailChoices = std::map<std::pair<int, size_t>, std::vector<int>>;

// Realization-by-realization minimization of the static problem, without
// tying together tail prescriptions that several realizations share.
struct Separable {
  double value = 0.0;
  bool conflict = false;
  uint64_t work = 0;
};

Separable separable_static(const Instance& inst, int k, const std::map<size_t, InformationState>& states,
                           const std::map<size_t, double>& p0, uint64_t cap) {
  const int K = inst.agents();
  const int top = K - 1;
  const SystemSpec& sys = inst.system;
  Separable out;
  TailChoices chosen;
  const InfoSchema& atop = inst.info.accessible(0, top);
  const InfoSchema& ak = inst.info.accessible(0, k);
  const InfoSchema extra = schema_difference(ak, atop);
  const Domain edom(extra, inst.card);
  for (const auto& [ai, pi] : states) {
    const std::vector<int> epos = positions_in(extra, pi.support);
    std::vector<std::vector<int>> dpos;
    std::vector<Domain> doms;
    for (int i = 0; i < K; ++i) {
      dpos.push_back(positions_in(inst.info.prescription_domain(0, k, i), pi.support));
      doms.emplace_back(inst.info.prescription_domain(0, k, i), inst.card);
    }
    // Group points by their realization of A^k beyond the common part.
    std::map<size_t, std::vector<size_t>> groups;
    for (size_t si = 0; si < pi.probs.size(); ++si) {
      if (pi.probs[si] <= 0.0) continue;
      const EqState s = decode_state(pi, si);
      std::vector<int> ev;
      for (int q : epos) ev.push_back(s.values[static_cast<size_t>(q)]);
      groups[edom.encode(ev)].push_back(si);
    }
    const std::vector<int> atop_vals = Domain(atop, inst.card).decode(ai);
    for (const auto& [sg, members] : groups) {
      std::vector<std::vector<int>> tables;
      for (int i = 0; i < K; ++i) tables.emplace_back(doms[static_cast<size_t>(i)].size(), 0);
      double best = 0.0;
      bool found = false;
      std::vector<std::vector<int>> best_tabs;
      const int last = K - 1;
      const int U = inst.card.control[static_cast<size_t>(last)];
      while (true) {
        if (++out.work > cap) throw Error(ErrorKind::CapExceeded, "separable static minimization exceeded the work cap");
        std::vector<double> acc(doms[static_cast<size_t>(last)].size() * static_cast<size_t>(U), 0.0);
        std::vector<int> u(static_cast<size_t>(K));
        for (size_t si : members) {
          const EqState s = decode_state(pi, si);
          std::vector<size_t> ent;
          for (int i = 0; i < K; ++i) {
            std::vector<int> v;
            for (int q : dpos[static_cast<size_t>(i)]) v.push_back(s.values[static_cast<size_t>(q)]);
            ent.push_back(doms[static_cast<size_t>(i)].encode(v));
          }
          for (int i = 0; i < last; ++i) u[static_cast<size_t>(i)] = tables[static_cast<size_t>(i)][ent[static_cast<size_t>(i)]];
          for (int a = 0; a < U; ++a) {
            u[static_cast<size_t>(last)] = a;
            acc[ent[static_cast<size_t>(last)] * static_cast<size_t>(U) + static_cast<size_t>(a)] +=
                pi.probs[si] * sys.cost[0][static_cast<size_t>(s.x)][static_cast<size_t>(sys.joint_control_index(u))];
          }
        }
        double v = 0.0;
        std::vector<int> own(doms[static_cast<size_t>(last)].size(), 0);
        for (size_t e = 0; e < own.size(); ++e) {
          int arg = 0;
          for (int a = 1; a < U; ++a)
            if (acc[e * static_cast<size_t>(U) + static_cast<size_t>(a)] < acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)] - kTie)
              arg = a;
          own[e] = arg;
          v += acc[e * static_cast<size_t>(U) + static_cast<size_t>(arg)];
        }
        if (!found || v < best - kTie) {
          found = true;
          best = v;
          best_tabs = tables;
          best_tabs[static_cast<size_t>(last)] = own;
        }
        int i = last - 1;
        bool done = true;
        while (i >= 0 && done) {
          auto& tab = tables[static_cast<size_t>(i)];
          const int Ui = inst.card.control[static_cast<size_t>(i)];
          for (size_t e = tab.size(); e-- > 0;) {
            if (++tab[e] < Ui) {
              done = false;
              break;
            }
            tab[e] = 0;
          }
          if (done) --i;
        }
        if (done) break;
      }
      out.value += p0.at(ai) * best;
      // Tail prescriptions must be the same for every realization that agrees
      // on the target's accessible information.
      std::vector<int> akv(ak.size());
      const std::vector<int> ev = edom.decode(sg);
      const std::vector<int> p_top = positions_in(atop, ak);
      const std::vector<int> p_extra = positions_in(extra, ak);
      for (size_t n = 0; n < p_top.size(); ++n) akv[static_cast<size_t>(p_top[n])] = atop_vals[n];
      for (size_t n = 0; n < p_extra.size(); ++n) akv[static_cast<size_t>(p_extra[n])] = ev[n];
      for (int i = k + 1; i < K; ++i) {
        const InfoSchema& ai_s = inst.info.accessible(0, i);
        const std::vector<int> pos = positions_in(ai_s, ak);
        std::vector<int> v;
        for (int q : pos) v.push_back(akv[static_cast<size_t>(q)]);
        const auto key = std::make_pair(i, Domain(ai_s, inst.card).encode(v));
        auto [it, fresh] = chosen.emplace(key, best_tabs[static_cast<size_t>(i)]);
        if (!fresh && it->second != best_tabs[static_cast<size_t>(i)]) out.conflict = true;
      }
    }
  }
  return out;
}

SolveResult run_search(const Instance& inst, int k, PrescriptionSearch::Keying keying, const SolverOptions& opt,
                       const char* method) {
  const auto start = std::chrono::steady_clock::now();
  if (k < 0 || k >= inst.agents()) throw Error(ErrorKind::InvalidAgent, "no agent " + std::to_string(k + 1));
  const int T = inst.horizon();
  const int K = inst.agents();
  const int top = K - 1;
  PrescriptionSearch search(inst, k, keying, opt.cap);

  SolveResult r;
  r.method = method;
  r.agent = k;
  r.tuple_keys.assign(static_cast<size_t>(T + 1), std::vector<std::map<size_t, std::vector<int64_t>>>(static_cast<size_t>(K)));
  PrescriptionStrategy psi = zero_prescription_strategy(inst, k);

  std::map<size_t, InformationState> states = initial_information_state(inst, top);
  const auto p0 = initial_accessible_probs(inst, top);
  for (const auto& [ai, pi] : states) r.search_value += p0.at(ai) * search.solve(pi).value;

  for (int t = 0; t <= T; ++t) {
    const InfoSchema& atop = inst.info.accessible(t, top);
    const Domain at(atop, inst.card);
    const Domain an = t < T ? Domain(inst.info.accessible(t + 1, top), inst.card) : Domain();
    std::map<size_t, InformationState> next;
    for (const auto& [ai, pi] : states) {
      const auto& node = search.solve(pi);
      const auto lay = search.layout(pi);
      const std::vector<int> av = at.decode(ai);
      for (int L = 0; L < lay.levels; ++L) {
        const int lev = search.level_value(L);
        const InfoSchema& alev = inst.info.accessible(t, lev);
        const InfoSchema extra = schema_difference(alev, atop);
        const Domain edom(extra, inst.card);
        const Domain ldom(alev, inst.card);
        const std::vector<int> p_top = positions_in(atop, alev);
        const std::vector<int> p_extra = positions_in(extra, alev);
        for (const auto& [sg, c] : lay.subgroup_class[static_cast<size_t>(L)]) {
          const std::vector<int> ev = edom.decode(sg);
          std::vector<int> full(alev.size());
          for (size_t n = 0; n < p_top.size(); ++n) full[static_cast<size_t>(p_top[n])] = av[n];
          for (size_t n = 0; n < p_extra.size(); ++n) full[static_cast<size_t>(p_extra[n])] = ev[n];
          const size_t li = ldom.encode(full);
          for (int i : lay.agents_at[static_cast<size_t>(L)]) {
            psi.laws[static_cast<size_t>(t)][static_cast<size_t>(i)].tables[li] =
                node.tables[static_cast<size_t>(lay.slot_of(L, c, i))];
            if (i >= k)
              r.tuple_keys[static_cast<size_t>(t)][static_cast<size_t>(i)][li] =
                  lay.chain_key[static_cast<size_t>(L)][static_cast<size_t>(c)];
          }
        }
      }
      if (t == T) continue;
      for (auto& [zi, b] : branch(inst, pi, search.effective(pi, lay, node.tables)))
        next.emplace(an.encode(extend_accessible(inst, top, t, av, b.z)), std::move(b.next));
    }
    r.beliefs.push_back(std::move(states));
    states = std::move(next);
  }

  r.strategy = strategy_to_control(inst, psi);
  r.prescription = std::move(psi);
  r.optimal_cost = exact_strategy_cost(inst, r.strategy).expected_cost;
  r.search_size = count_strategies(inst, {CountMode::Kind::Agent, k});
  r.evaluated = search.work();
  if (T == 0) {
    const Separable sep = separable_static(inst, k, initial_information_state(inst, top), p0, opt.cap);
    r.separable_value = sep.value;
    r.tail_conflict = sep.conflict;
    r.evaluated += sep.work;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

SolveResult solve_prescription_static(const Instance& inst, int k, const SolverOptions& opt) {
  if (inst.horizon() != 0) throw Error(ErrorKind::SchemaMismatch, "static decomposition needs horizon 0");
  return run_search(inst, k, PrescriptionSearch::Keying::Realization, opt, "prescription-static");
}

SolveResult solve_prescription_dp(const Instance& inst, int k, const SolverOptions& opt) {
  return run_search(inst, k, PrescriptionSearch::Keying::Belief, opt, "prescription");
}

SolveResult solve_prescription(const Instance& inst, int k, const SolverOptions& opt) {
  return inst.horizon() == 0 ? solve_prescription_static(inst, k, opt) : solve_prescription_dp(inst, k, opt);
}

}  // namespace wom
