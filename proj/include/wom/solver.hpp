#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wom/belief.hpp"
#include "wom/prescription.hpp"
#include "wom/sysmodel.hpp"

namespace wom {

constexpr uint64_t kDefaultSolverCap = uint64_t{1} << 24;

struct SolverOptions {
  /// Bound on the work a solver may do (strategies or prescription
  /// combinations actually evaluated); CapExceeded beyond it.
  uint64_t cap = kDefaultSolverCap;
};

struct SolveResult {
  std::string method;  // "brute", "common-info", "prescription", "prescription-static"
  int agent = -1;      // owner for prescription methods, 0-based
  /// Exact expected cost of the emitted control strategy.
  double optimal_cost = 0.0;
  /// Value produced by the search or recursion itself.
  double search_value = 0.0;
  ControlStrategy strategy;
  std::optional<PrescriptionStrategy> prescription;
  BigInt search_size = 0;
  uint64_t evaluated = 0;
  double wall_time = 0.0;

  // Static decomposition only: per-realization minimization without forcing
  // shared tail prescriptions to agree, and whether they disagreed.
  std::optional<double> separable_value;
  bool tail_conflict = false;

  /// For each t and target at or above the owner, the rounded belief tuple of
  /// every reached conditioning realization (DP methods only).
  std::vector<std::vector<std::map<size_t, std::vector<int64_t>>>> tuple_keys;
  /// Highest-indexed agent's beliefs per t keyed by its accessible realization.
  std::vector<std::map<size_t, InformationState>> beliefs;
};

SolveResult solve_brute_force(const Instance& inst, const SolverOptions& opt = {});
SolveResult solve_common_info_dp(const Instance& inst, const SolverOptions& opt = {});
SolveResult solve_prescription_static(const Instance& inst, int k, const SolverOptions& opt = {});
SolveResult solve_prescription_dp(const Instance& inst, int k, const SolverOptions& opt = {});
/// Static solver when T = 0, DP otherwise.
SolveResult solve_prescription(const Instance& inst, int k, const SolverOptions& opt = {});

CostReport evaluate_prescription_strategy(const Instance& inst, const PrescriptionStrategy& psi);

struct ComparisonRow {
  std::string method;
  int agent = -1;
  bool ok = false;
  std::string error;  // set when !ok
  std::optional<SolveResult> result;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool consistent = true;  // every successful solver within tolerance of the others
  double max_gap = 0.0;
};

constexpr double kCostTolerance = 1e-9;

Comparison compare_agents(const Instance& inst, const SolverOptions& opt = {});

/// Probability of every time-0 accessible realization of agent k.
std::map<size_t, double> initial_accessible_probs(const Instance& inst, int k);

}  // namespace wom
