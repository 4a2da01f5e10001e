#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wom/prescription.hpp"
#include "wom/sysmodel.hpp"

namespace wom {

/// Distribution over (X_t, filter-state variables) of one agent. The state is
/// the most significant coordinate.
struct InformationState {
  int agent = 0;
  int time = 0;
  InfoSchema support;
  std::vector<int> radices;  // |X| first, then one per support variable
  std::vector<double> probs;

  size_t size() const { return probs.size(); }
};

/// Marginal of a higher-indexed agent's belief on the variables that the
/// lower-indexed agent can access and it cannot.
struct ConnectionTerm {
  int lower = 0;   // k
  int higher = 0;  // i
  int time = 0;
  InfoSchema support;
  std::vector<int> radices;
  std::vector<double> probs;
};

/// One realization of the equivalent state; `values` follow filter_state(t, k).
struct EqState {
  int x = 0;
  std::vector<int> values;
  friend bool operator==(const EqState&, const EqState&) = default;
};

InformationState make_information_state(const Instance& inst, int k, int t);
EqState decode_state(const InformationState& pi, size_t index);
size_t encode_state(const InformationState& pi, const EqState& s);

/// Controls of every agent produced by `theta` on `s`.
std::vector<int> prescribed_controls(const Instance& inst, int k, int t, const EqState& s, const CompletePrescription& theta);

EqState hat_dynamics(const Instance& inst, int k, int t, const EqState& s, int w, const std::vector<int>& v_next,
                     const CompletePrescription& theta);
/// Needs the disturbance as well: the next observations depend on the next state.
std::vector<int> hat_observation(const Instance& inst, int k, int t, const EqState& s, int w,
                                 const std::vector<int>& v_next, const CompletePrescription& theta);
double hat_cost(const Instance& inst, int k, int t, const EqState& s, const CompletePrescription& theta);

/// Keyed by the index of the time-0 accessible realization; only
/// positive-probability realizations appear.
std::map<size_t, InformationState> initial_information_state(const Instance& inst, int k);

struct Branch {
  std::vector<int> z;  // new-information realization at t+1
  double prob = 0.0;
  InformationState next;
};

/// Every positive-probability new-information outcome, ordered by its index.
std::map<size_t, Branch> branch(const Instance& inst, const InformationState& pi, const CompletePrescription& theta);

InformationState update_information_state(const Instance& inst, const InformationState& pi,
                                          const CompletePrescription& theta, const std::vector<int>& z);

double expected_stage_cost(const Instance& inst, const InformationState& pi, const CompletePrescription& theta);

ConnectionTerm connection_term(const Instance& inst, const InformationState& pi_i, int k);

/// Largest |Pi^i(s^i) - Pi^k(s^k) Lambda(s^i minus s^k)|, where Pi^k is looked up
/// by the accessible realization a^k obtained by extending `a_i_values`.
double factorization_check(const Instance& inst, const InformationState& pi_i, const std::vector<int>& a_i_values,
                           const ConnectionTerm& lambda, const std::map<size_t, InformationState>& pi_k_by_accessible);

/// Marginal of agent i's belief restricted to the realizations consistent with
/// the listed accessible values of agent k (k < i), then projected onto agent
/// k's filter state.
InformationState condition_to_lower(const Instance& inst, const InformationState& pi_i, int k,
                                    const std::vector<int>& extra_values);

/// Canonical key of a belief: probabilities rounded to 12 decimals.
std::vector<int64_t> belief_key(const InformationState& pi);

/// Runs the filter forward under a fixed control strategy. states[t] maps the
/// index of each positive-probability accessible realization to the belief;
/// probs[t] holds that realization's probability.
struct BeliefTrace {
  std::vector<std::map<size_t, InformationState>> states;
  std::vector<std::map<size_t, double>> probs;
};
BeliefTrace beliefs_under_strategy(const Instance& inst, const ControlStrategy& g, int k);

/// Accessible realization at t+1 from the one at t and the new information.
std::vector<int> extend_accessible(const Instance& inst, int k, int t, const std::vector<int>& a_t,
                                   const std::vector<int>& z_next);

}  // namespace wom
