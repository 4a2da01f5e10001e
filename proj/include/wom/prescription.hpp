#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wom/infostruct.hpp"
#include "wom/sysmodel.hpp"

namespace wom {

using BigInt = boost::multiprecision::cpp_int;

/// Table from realizations of `domain` to controls of `target`.
struct Prescription {
  int owner = 0;
  int target = 0;
  int time = 0;
  InfoSchema domain;
  std::vector<int> radices;
  std::vector<int> table;

  friend bool operator==(const Prescription&, const Prescription&) = default;
};

struct CompletePrescription {
  int owner = 0;
  int time = 0;
  std::vector<Prescription> parts;  // one per target agent
};

/// The owner's law for one target at one time: a prescription table for every
/// realization of the conditioning set.
struct PrescriptionLaw {
  int target = 0;
  InfoSchema conditioning;
  InfoSchema domain;
  std::vector<std::vector<int>> tables;  // [conditioning realization][domain realization]
};

struct PrescriptionStrategy {
  int owner = 0;
  std::vector<std::vector<PrescriptionLaw>> laws;  // [t][target]

  Prescription prescription(const Instance& inst, int t, int target, size_t conditioning_index) const;
  /// Complete prescription given the owner's accessible realization at t.
  CompletePrescription complete(const Instance& inst, int t, std::span<const int> accessible_values) const;
};

Prescription make_prescription(const Instance& inst, int owner, int target, int t, std::vector<int> table);

int apply_prescription(const Prescription& p, std::span<const int> realization);

constexpr uint64_t kDefaultEnumerationCap = uint64_t{1} << 20;

/// Calls `visit` for every table over `domain_size` points with controls in
/// 0..control_size-1, lexicographic with the first entry most significant.
/// Stops early when `visit` returns false.
void for_each_table(size_t domain_size, int control_size, const std::function<bool(const std::vector<int>&)>& visit);

std::vector<Prescription> enumerate_prescriptions(const Instance& inst, int owner, int target, int t,
                                                  uint64_t cap = kDefaultEnumerationCap);
/// Schema-level variant for arbitrary domains.
std::vector<std::vector<int>> enumerate_tables(const InfoSchema& domain, const Cardinalities& card, int control_size,
                                               uint64_t cap = kDefaultEnumerationCap);

struct CountMode {
  enum class Kind { Brute, Agent } kind = Kind::Brute;
  int agent = 0;
};

/// Brute: product over stages and agents of |U|^(memory realizations).
/// Agent k: summed over stages and accessible realizations, the product of
/// the prescription-table counts searched jointly for that realization.
BigInt count_strategies(const Instance& inst, CountMode mode);

ControlStrategy strategy_to_control(const Instance& inst, const PrescriptionStrategy& psi);
/// Only the owner's own component, tables[t].
std::vector<std::vector<int>> strategy_to_control_law(const Instance& inst, const PrescriptionStrategy& psi);
PrescriptionStrategy control_law_to_strategy(const Instance& inst, const ControlStrategy& g, int owner);
PrescriptionStrategy translate_strategy(const Instance& inst, const PrescriptionStrategy& psi, int dst_owner);

void check_prescription_strategy(const Instance& inst, const PrescriptionStrategy& psi);

}  // namespace wom
