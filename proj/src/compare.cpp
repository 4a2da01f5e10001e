#include <algorithm>
#include <cmath>

#include "wom/error.hpp"
#include "wom/solver.hpp"

namespace wom {

namespace {

template <class Fn>
ComparisonRow attempt(std::string method, int agent, Fn&& fn) {
  ComparisonRow row;
  row.method = std::move(method);
  row.agent = agent;
  try {
    row.result = fn();
    row.ok = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CapExceeded) throw;
    row.error = e.what();
  }
  return row;
}

}  // namespace

Comparison compare_agents(const Instance& inst, const SolverOptions& opt) {
  Comparison cmp;
  cmp.rows.push_back(attempt("brute", -1, [&] { return solve_brute_force(inst, opt); }));
  cmp.rows.push_back(attempt("common-info", inst.agents() - 1, [&] { return solve_common_info_dp(inst, opt); }));
  for (int k = 0; k < inst.agents(); ++k)
    cmp.rows.push_back(attempt(inst.horizon() == 0 ? "prescription-static" : "prescription", k,
                               [&] { return solve_prescription(inst, k, opt); }));

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const ComparisonRow& row : cmp.rows) {
    if (!row.ok) continue;
    const double c = row.result->optimal_cost;
    lo = any ? std::min(lo, c) : c;
    hi = any ? std::max(hi, c) : c;
    any = true;
  }
  cmp.max_gap = any ? hi - lo : 0.0;
  cmp.consistent = cmp.max_gap <= kCostTolerance;
  return cmp;
}

}  // namespace wom
