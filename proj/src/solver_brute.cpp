#include <chrono>
#include <set>

#include "wom/error.hpp"
#include "wom/solver.hpp"

namespace wom {

namespace {

constexpr double kTie = 1e-12;

// Depth-first search over control tables, stage by stage and agent by agent.
// Only memory realizations reachable under the choices made so far are
// enumerated; the others cannot change the cost. The last agent's final
// table is chosen entry by entry, which is exact because the expected cost is
// a sum over its entries.
class BruteSearch {
 public:
  BruteSearch(const Instance& inst, uint64_t cap) : inst_(inst), lay_(inst.agents(), inst.horizon()), cap_(cap) {
    for (int t = 0; t <= inst.horizon(); ++t)
      for (int k = 0; k < inst.agents(); ++k) {
        slots_.push_back(lay_.slots(inst.info.memory(t, k)));
        doms_.emplace_back(inst.info.memory(t, k), inst.card);
      }
    current_ = zero_strategy(inst);
    best_ = current_;
  }

  void run() { agent(0, 0, initial_layer(inst_), 0.0); }

  double best_value() const { return best_value_; }
  const ControlStrategy& best() const { return best_; }
  uint64_t work() const { return work_; }

 private:
  size_t at(int t, int k) const { return static_cast<size_t>(t * inst_.agents() + k); }

  void tick() {
    if (++work_ > cap_)
      throw Error(ErrorKind::CapExceeded, "brute-force search exceeded the work cap of " + std::to_string(cap_));
  }

  void offer(double value) {
    if (!found_ || value < best_value_ - kTie) {
      found_ = true;
      best_value_ = value;
      best_ = current_;
    }
  }

  void agent(int t, int k, const Layer& layer, double cost) {
    const int K = inst_.agents();
    const size_t c = at(t, k);
    std::set<size_t> reach;
    for (const auto& [h, p] : layer) reach.insert(project(h, slots_[c], doms_[c]));
    const std::vector<size_t> entries(reach.begin(), reach.end());
    auto& table = current_.tables[static_cast<size_t>(t)][static_cast<size_t>(k)];
    std::fill(table.begin(), table.end(), 0);
    const int U = inst_.card.control[static_cast<size_t>(k)];
    const int uslot = lay_.slot(Uv(k, t));

    if (t == inst_.horizon() && k == K - 1) {
      final_entrywise(t, k, layer, cost, entries);
      return;
    }
    std::vector<int> digits(entries.size(), 0);
    while (true) {
      tick();
      for (size_t n = 0; n < entries.size(); ++n) table[entries[n]] = digits[n];
      Layer acted;
      for (const auto& [h, p] : layer) {
        History a = h;
        a.values[static_cast<size_t>(uslot)] = table[project(h, slots_[c], doms_[c])];
        acted.emplace(std::move(a), p);
      }
      if (k + 1 < K) {
        agent(t, k + 1, acted, cost);
      } else {
        const double total = cost + layer_stage_cost(inst_, acted, t);
        if (t < inst_.horizon())
          agent(t + 1, 0, advance_layer(inst_, acted, t), total);
        else
          offer(total);
      }
      size_t n = digits.size();
      bool done = true;
      while (n > 0) {
        --n;
        if (++digits[n] < U) {
          done = false;
          break;
        }
        digits[n] = 0;
      }
      if (done) break;
    }
    std::fill(table.begin(), table.end(), 0);
  }

  void final_entrywise(int t, int k, const Layer& layer, double cost, const std::vector<size_t>& entries) {
    tick();
    const SystemSpec& sys = inst_.system;
    const int U = inst_.card.control[static_cast<size_t>(k)];
    const size_t c = at(t, k);
    std::map<size_t, std::vector<double>> acc;
    for (size_t e : entries) acc[e].assign(static_cast<size_t>(U), 0.0);
    std::vector<int> u(static_cast<size_t>(inst_.agents()));
    for (const auto& [h, p] : layer) {
      for (int j = 0; j < k; ++j) u[static_cast<size_t>(j)] = h.values[static_cast<size_t>(lay_.slot(Uv(j, t)))];
      auto& row = acc[project(h, slots_[c], doms_[c])];
      for (int a = 0; a < U; ++a) {
        u[static_cast<size_t>(k)] = a;
        row[static_cast<size_t>(a)] +=
            p * sys.cost[static_cast<size_t>(t)][static_cast<size_t>(h.x)][static_cast<size_t>(sys.joint_control_index(u))];
      }
    }
    auto& table = current_.tables[static_cast<size_t>(t)][static_cast<size_t>(k)];
    double total = cost;
    for (const auto& [e, row] : acc) {
      int arg = 0;
      for (int a = 1; a < U; ++a)
        if (row[static_cast<size_t>(a)] < row[static_cast<size_t>(arg)] - kTie) arg = a;
      table[e] = arg;
      total += row[static_cast<size_t>(arg)];
    }
    offer(total);
    std::fill(table.begin(), table.end(), 0);
  }

  const Instance& inst_;
  VariableLayout lay_;
  uint64_t cap_;
  uint64_t work_ = 0;
  std::vector<std::vector<int>> slots_;
  std::vector<Domain> doms_;
  ControlStrategy current_, best_;
  double best_value_ = 0.0;
  bool found_ = false;
};

}  // namespace

SolveResult solve_brute_force(const Instance& inst, const SolverOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  BruteSearch search(inst, opt.cap);
  search.run();
  SolveResult r;
  r.method = "brute";
  r.search_value = search.best_value();
  r.strategy = search.best();
  r.optimal_cost = exact_strategy_cost(inst, r.strategy).expected_cost;
  r.search_size = count_strategies(inst, {CountMode::Kind::Brute, 0});
  r.evaluated = search.work();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace wom
