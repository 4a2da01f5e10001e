#pragma once

#include <vector>

namespace wom {

/// Directed communication link. Agents are 0-based inside the library; the
/// JSON format and CLI output are 1-based.
struct Link {
  int from = 0;
  int to = 0;
  int delay = 1;  // time steps, >= 1
};

struct NetworkSpec {
  int agents = 0;
  std::vector<Link> links;
};

/// Minimal communication delays between every ordered pair of agents.
class DelayMatrix {
 public:
  DelayMatrix() = default;
  explicit DelayMatrix(int agents);
  DelayMatrix(int agents, std::vector<int> row_major);

  int size() const { return agents_; }
  int operator()(int from, int to) const { return d_[static_cast<size_t>(from * agents_ + to)]; }
  int& at(int from, int to) { return d_[static_cast<size_t>(from * agents_ + to)]; }
  int max_delay() const;

  friend bool operator==(const DelayMatrix&, const DelayMatrix&) = default;

 private:
  int agents_ = 0;
  std::vector<int> d_;
};

struct InfoPath {
  std::vector<int> agents;
  int total_delay = 0;
};

/// Checks link ranges, delays, duplicates, self-loops and strong connectivity.
/// Returns the spec unchanged, throws wom::Error otherwise.
NetworkSpec validate_network(NetworkSpec spec);

/// Min-plus relaxation over at most K-1 links. Requires a validated spec.
DelayMatrix compute_delay_matrix(const NetworkSpec& spec);

/// A minimum-delay path from `from` to `to`; ties resolve to the
/// lexicographically smallest agent sequence.
InfoPath information_path(const NetworkSpec& spec, int from, int to);

}  // namespace wom
