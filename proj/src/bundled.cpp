#include "wom/bundled.hpp"

#include "wom/error.hpp"

namespace wom::bundled {

namespace {

NetworkSpec star3() { return {3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}}}; }

std::vector<int> bits(int u, int n) {
  std::vector<int> b(static_cast<size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    b[static_cast<size_t>(k)] = u & 1;
    u >>= 1;
  }
  return b;
}

}  // namespace

Instance static3() {
  SystemSpec s;
  s.horizon = 0;
  s.state_size = 2;
  s.control_sizes = {2, 2, 2};
  s.observation_sizes = {2, 2, 2};
  s.disturbance = {1, {{1.0}}};
  s.noises.assign(3, PrimitiveSpec{2, {{0.8, 0.2}}});
  s.initial_probs = {0.5, 0.5};
  s.observation.assign(3, {{{0, 1}, {1, 0}}});
  s.cost.assign(1, std::vector<std::vector<double>>(2, std::vector<double>(8)));
  for (int x = 0; x < 2; ++x)
    for (int u = 0; u < 8; ++u) {
      const auto b = bits(u, 3);
      double c = 0.0;
      for (int v : b) c += v != x;
      c += 0.7 * (b[0] != b[1]) + 0.7 * (b[1] != b[2]);
      s.cost[0][static_cast<size_t>(x)][static_cast<size_t>(u)] = c;
    }
  std::vector<std::vector<InfoSchema>> mem{{{Yv(0, 0), Yv(1, 0), Yv(2, 0)}, {Yv(1, 0), Yv(2, 0)}, {Yv(2, 0)}}};
  return validate_instance(std::move(s), star3(), std::move(mem));
}

Instance static3_reindexed() { return permute_agents(static3(), {2, 1, 0}); }

Instance d2(int horizon) {
  SystemSpec s;
  s.horizon = horizon;
  s.state_size = 2;
  s.control_sizes = {2, 2};
  s.observation_sizes = {2, 2};
  s.disturbance = {2, {{0.8, 0.2}}};
  s.noises.assign(2, PrimitiveSpec{1, {{1.0}}});
  s.initial_probs = {0.4, 0.6};
  s.observation.assign(2, std::vector<std::vector<std::vector<int>>>(static_cast<size_t>(horizon + 1), {{0}, {1}}));
  // Both agents idle: the state is redrawn; otherwise it persists up to a flip.
  s.transition.assign(static_cast<size_t>(horizon), std::vector<std::vector<std::vector<int>>>(2, std::vector<std::vector<int>>(4)));
  for (int t = 0; t < horizon; ++t)
    for (int x = 0; x < 2; ++x)
      for (int u = 0; u < 4; ++u)
        for (int w = 0; w < 2; ++w)
          s.transition[static_cast<size_t>(t)][static_cast<size_t>(x)][static_cast<size_t>(u)].push_back(u == 0 ? w : x ^ w);
  s.cost.assign(static_cast<size_t>(horizon + 1), std::vector<std::vector<double>>(2, std::vector<double>(4)));
  for (int t = 0; t <= horizon; ++t)
    for (int x = 0; x < 2; ++x)
      for (int u = 0; u < 4; ++u) {
        const auto b = bits(u, 2);
        s.cost[static_cast<size_t>(t)][static_cast<size_t>(x)][static_cast<size_t>(u)] = (b[0] != x) + (b[1] != x) + 1.5 * x;
      }
  return validate_instance(std::move(s), {2, {{0, 1, 1}, {1, 0, 1}}});
}

Instance wom3(int horizon) {
  SystemSpec s;
  s.horizon = horizon;
  s.state_size = 8;
  s.control_sizes = {2, 2, 2};
  s.observation_sizes = {2, 2, 2};
  std::vector<double> pw(8), px(8);
  for (int v = 0; v < 8; ++v) {
    double a = 1.0, b = 1.0;
    for (int bit : bits(v, 3)) {
      a *= bit ? 0.2 : 0.8;
      b *= bit ? 0.3 : 0.7;
    }
    pw[static_cast<size_t>(v)] = a;
    px[static_cast<size_t>(v)] = b;
  }
  s.disturbance = {8, {pw}};
  s.noises.assign(3, PrimitiveSpec{1, {{1.0}}});
  s.initial_probs = px;
  s.observation.resize(3);
  for (int k = 0; k < 3; ++k)
    for (int t = 0; t <= horizon; ++t) {
      std::vector<std::vector<int>> row;
      for (int x = 0; x < 8; ++x) row.push_back({bits(x, 3)[static_cast<size_t>(k)]});
      s.observation[static_cast<size_t>(k)].push_back(std::move(row));
    }
  s.transition.assign(static_cast<size_t>(horizon), std::vector<std::vector<std::vector<int>>>(8, std::vector<std::vector<int>>(8)));
  s.cost.assign(static_cast<size_t>(horizon + 1), std::vector<std::vector<double>>(8, std::vector<double>(8)));
  for (int x = 0; x < 8; ++x)
    for (int u = 0; u < 8; ++u) {
      const auto xb = bits(x, 3), ub = bits(u, 3);
      for (int t = 0; t < horizon; ++t)
        for (int w = 0; w < 8; ++w) {
          const auto wb = bits(w, 3);
          int nx = 0;
          for (int k = 0; k < 3; ++k)
            nx = nx * 2 + ((ub[static_cast<size_t>(k)] ? 0 : xb[static_cast<size_t>(k)]) | wb[static_cast<size_t>(k)]);
          s.transition[static_cast<size_t>(t)][static_cast<size_t>(x)][static_cast<size_t>(u)].push_back(nx);
        }
      const int nx_on = xb[0] + xb[1] + xb[2];
      const int nu = ub[0] + ub[1] + ub[2];
      for (int t = 0; t <= horizon; ++t)
        s.cost[static_cast<size_t>(t)][static_cast<size_t>(x)][static_cast<size_t>(u)] = nx_on + 0.4 * nu + 0.6 * (nu >= 2);
    }
  return validate_instance(std::move(s), star3());
}

std::vector<std::string> names() { return {"static3", "static3-reindexed", "d2", "d2-t2", "wom3", "wom3-t2"}; }

Instance by_name(const std::string& name) {
  if (name == "static3") return static3();
  if (name == "static3-reindexed") return static3_reindexed();
  if (name == "d2") return d2(1);
  if (name == "d2-t2") return d2(2);
  if (name == "wom3") return wom3(1);
  if (name == "wom3-t2") return wom3(2);
  throw Error(ErrorKind::Parse, "unknown bundled instance '" + name + "'");
}

}  // namespace wom::bundled
