#include "wom/netgraph.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "wom/error.hpp"

namespace wom {

namespace {

constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

// Link delay lookup; kUnreachable when there is no direct link.
std::vector<int> link_table(const NetworkSpec& spec) {
  const int n = spec.agents;
  std::vector<int> delta(static_cast<size_t>(n * n), kUnreachable);
  for (const Link& l : spec.links) delta[static_cast<size_t>(l.from * n + l.to)] = l.delay;
  return delta;
}

}  // namespace

DelayMatrix::DelayMatrix(int agents) : agents_(agents), d_(static_cast<size_t>(agents * agents), 0) {}

DelayMatrix::DelayMatrix(int agents, std::vector<int> row_major) : agents_(agents), d_(std::move(row_major)) {
  if (d_.size() != static_cast<size_t>(agents * agents))
    throw Error(ErrorKind::ShapeMismatch, "delay matrix needs " + std::to_string(agents * agents) + " entries");
}

int DelayMatrix::max_delay() const { return d_.empty() ? 0 : *std::max_element(d_.begin(), d_.end()); }

NetworkSpec validate_network(NetworkSpec spec) {
  const int n = spec.agents;
  if (n < 1) throw Error(ErrorKind::InvalidAgent, "network needs at least one agent");
  std::set<std::pair<int, int>> seen;
  for (const Link& l : spec.links) {
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n)
      throw Error(ErrorKind::InvalidAgent, "link (" + std::to_string(l.from + 1) + "," + std::to_string(l.to + 1) +
                                               ") references an agent outside 1.." + std::to_string(n));
    if (l.from == l.to)
      throw Error(ErrorKind::ExplicitSelfLoop,
                  "self-loop on agent " + std::to_string(l.from + 1) + " is implicit and must not be listed");
    if (l.delay < 1)
      throw Error(ErrorKind::NonPositiveDelay, "link (" + std::to_string(l.from + 1) + "," + std::to_string(l.to + 1) +
                                                   ") has delay " + std::to_string(l.delay));
    if (!seen.insert({l.from, l.to}).second)
      throw Error(ErrorKind::DuplicateLink,
                  "link (" + std::to_string(l.from + 1) + "," + std::to_string(l.to + 1) + ") listed twice");
  }

  // Reachability closure; delays do not matter here.
  std::vector<char> reach(static_cast<size_t>(n * n), 0);
  for (int k = 0; k < n; ++k) reach[static_cast<size_t>(k * n + k)] = 1;
  for (const Link& l : spec.links) reach[static_cast<size_t>(l.from * n + l.to)] = 1;
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      if (reach[static_cast<size_t>(k * n + m)])
        for (int j = 0; j < n; ++j)
          if (reach[static_cast<size_t>(m * n + j)]) reach[static_cast<size_t>(k * n + j)] = 1;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      if (!reach[static_cast<size_t>(k * n + j)])
        throw Error(ErrorKind::NotStronglyConnected,
                    "agent " + std::to_string(j + 1) + " is unreachable from agent " + std::to_string(k + 1) + " (pair (" +
                        std::to_string(k + 1) + "," + std::to_string(j + 1) + "))");
  return spec;
}

DelayMatrix compute_delay_matrix(const NetworkSpec& spec) {
  const int n = spec.agents;
  const std::vector<int> delta = link_table(spec);
  // best[k][j] after round r = least delay over paths with at most r links.
  std::vector<int> best(static_cast<size_t>(n * n), kUnreachable);
  for (int k = 0; k < n; ++k) best[static_cast<size_t>(k * n + k)] = 0;
  for (int round = 1; round < n; ++round) {
    std::vector<int> next = best;
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        const int head = best[static_cast<size_t>(k * n + m)];
        if (head >= kUnreachable) continue;
        for (int j = 0; j < n; ++j) {
          const int step = delta[static_cast<size_t>(m * n + j)];
          if (step >= kUnreachable) continue;
          next[static_cast<size_t>(k * n + j)] = std::min(next[static_cast<size_t>(k * n + j)], head + step);
        }
      }
    best = std::move(next);
  }
  for (int v : best)
    if (v >= kUnreachable) throw Error(ErrorKind::NotStronglyConnected, "delay matrix requested on an unvalidated network");
  return DelayMatrix(n, std::move(best));
}

InfoPath information_path(const NetworkSpec& spec, int from, int to) {
  const int n = spec.agents;
  if (from < 0 || from >= n || to < 0 || to >= n) throw Error(ErrorKind::InvalidAgent, "path endpoint out of range");
  const DelayMatrix d = compute_delay_matrix(spec);
  const std::vector<int> delta = link_table(spec);

  // Walking forward and always taking the smallest successor that stays on a
  // shortest path yields the lexicographically smallest shortest path.
  InfoPath path;
  path.total_delay = d(from, to);
  path.agents.push_back(from);
  int at = from;
  while (at != to) {
    for (int m = 0; m < n; ++m) {
      const int step = delta[static_cast<size_t>(at * n + m)];
      if (step < kUnreachable && step + d(m, to) == d(at, to)) {
        at = m;
        break;
      }
    }
    path.agents.push_back(at);
  }
  return path;
}

}  // namespace wom
