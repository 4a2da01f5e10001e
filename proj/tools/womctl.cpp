#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wom/bundled.hpp"
#include "wom/error.hpp"
#include "wom/io.hpp"
#include "wom/solver.hpp"

using wom::io::json;

namespace {

struct Loaded {
  wom::Instance inst;
  std::string digest;
  std::string source;
};

Loaded load(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw wom::Error(wom::ErrorKind::Parse, arg + " is not valid JSON: " + e.what());
    }
    return {wom::io::parse_instance(doc), wom::io::digest(doc), arg};
  }
  for (const std::string& name : wom::bundled::names())
    if (name == arg) {
      wom::Instance inst = wom::bundled::by_name(name);
      return {inst, wom::io::digest(wom::io::instance_to_json(inst)), "bundled:" + name};
    }
  throw wom::Error(wom::ErrorKind::Parse, "'" + arg + "' is neither a file nor a bundled instance");
}

uint64_t default_cap() {
  if (const char* env = std::getenv("WOMCTL_CAP")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw wom::Error(wom::ErrorKind::Parse, "WOMCTL_CAP must be a non-negative integer, got '" + std::string(env) + "'");
    }
  }
  return wom::kDefaultSolverCap;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw wom::Error(wom::ErrorKind::Parse, "cannot write " + path);
  out << j.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string agent_label(int agent) { return agent < 0 ? "-" : std::to_string(agent + 1); }

void print_results_table(const std::vector<wom::ComparisonRow>& rows) {
  std::printf("%-20s %5s %14s %14s %24s %10s\n", "method", "agent", "cost", "search value", "search size", "seconds");
  for (const auto& row : rows) {
    if (!row.ok) {
      std::printf("%-20s %5s  %s\n", row.method.c_str(), agent_label(row.agent).c_str(), row.error.c_str());
      continue;
    }
    const wom::SolveResult& r = *row.result;
    std::string size = r.search_size.str();
    if (size.size() > 24) size = size.substr(0, 8) + "...(" + std::to_string(size.size()) + " digits)";
    std::printf("%-20s %5s %14.9f %14.9f %24s %10.4f\n", r.method.c_str(), agent_label(r.agent).c_str(), r.optimal_cost,
                r.search_value, size.c_str(), r.wall_time);
  }
}

json beliefs_json(const wom::SolveResult& r) {
  json out = json::array();
  for (size_t t = 0; t < r.beliefs.size(); ++t)
    for (const auto& [idx, pi] : r.beliefs[t]) {
      json j = wom::io::to_json(pi);
      j["accessible_index"] = idx;
      out.push_back(j);
    }
  return out;
}

wom::ControlStrategy strategy_arg(const wom::Instance& inst, const std::string& path) {
  if (path.empty()) return wom::zero_strategy(inst);
  std::ifstream in(path);
  if (!in) throw wom::Error(wom::ErrorKind::Parse, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw wom::Error(wom::ErrorKind::Parse, path + " is not valid JSON: " + e.what());
  }
  // Accept both a bare strategy and the file written by `solve --emit-strategy`.
  const json& body = doc.contains("strategy") ? doc["strategy"] : doc;
  wom::ControlStrategy g = wom::io::control_strategy_from_json(body);
  wom::check_strategy(inst, g);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized control with word-of-mouth information sharing"};
  app.require_subcommand(1);

  std::string instance_arg, report_path, method = "prescription", emit_strategy, emit_beliefs, strategy_path;
  int agent = 0;
  int time = -1;
  uint64_t cap = 0;
  uint64_t samples = 10000, seed = 0;
  bool json_out = false;
  std::vector<std::string> demo_names;

  app.add_option("--report", report_path, "Write the JSON report to this path");
  app.add_flag("--json", json_out, "Print the JSON report instead of the text table");

  auto instance_option = [&](CLI::App* sub) {
    sub->add_option("instance", instance_arg, "Instance file or bundled name (" + [] {
      std::string s;
      for (const auto& n : wom::bundled::names()) s += (s.empty() ? "" : ", ") + n;
      return s;
    }() + ")")->required();
  };

  auto* validate = app.add_subcommand("validate", "Check an instance");
  instance_option(validate);
  auto* delays = app.add_subcommand("delays", "Print the minimal delay matrix and information paths");
  instance_option(delays);
  auto* schema = app.add_subcommand("schema", "Print memory, accessible, inaccessible and equivalent-state sets");
  instance_option(schema);
  schema->add_option("--time", time, "Only this time step");
  auto* counts = app.add_subcommand("counts", "Count strategies for brute force and each agent");
  instance_option(counts);
  auto* solve = app.add_subcommand("solve", "Compute an optimal strategy");
  instance_option(solve);
  solve->add_option("--method", method, "brute | common-info | prescription")
      ->check(CLI::IsMember({"brute", "common-info", "prescription"}));
  auto* agent_opt = solve->add_option("--agent", agent, "Owner agent for the prescription method (1-based)");
  solve->add_option("--cap", cap, "Work cap (default 2^24 or WOMCTL_CAP)");
  solve->add_option("--emit-strategy", emit_strategy, "Write the strategy JSON here");
  solve->add_option("--emit-beliefs", emit_beliefs, "Write the reached beliefs JSON here");
  auto* evaluate = app.add_subcommand("evaluate", "Exact expected cost of a control strategy");
  instance_option(evaluate);
  evaluate->add_option("--strategy", strategy_path, "Strategy JSON (default: all-zero controls)");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a control strategy's cost");
  instance_option(simulate);
  simulate->add_option("--strategy", strategy_path, "Strategy JSON (default: all-zero controls)");
  simulate->add_option("--samples", samples, "Number of rollouts")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Random seed");
  auto* compare = app.add_subcommand("compare", "Run every solver and compare costs");
  instance_option(compare);
  compare->add_option("--cap", cap, "Work cap (default 2^24 or WOMCTL_CAP)");
  auto* demo = app.add_subcommand("demo", "Counts and solver comparison on the bundled examples");
  demo->add_option("names", demo_names, "static3 and/or wom3 (default both)")
      ->check(CLI::IsMember({"static3", "wom3"}));
  demo->add_option("--cap", cap, "Work cap (default 2^24 or WOMCTL_CAP)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  json report;
  json timings;
  try {
    if (cap == 0) cap = default_cap();
    const wom::SolverOptions opt{cap};

    if (*demo) {
      if (demo_names.empty()) demo_names = {"static3", "wom3"};
      report = {{"command", "demo"}, {"results", json::array()}};
      json digests = json::array();
      for (const std::string& name : demo_names) {
        const auto ts = std::chrono::steady_clock::now();
        const wom::Instance inst = wom::bundled::by_name(name);
        json counts_j = {{"brute", wom::count_strategies(inst, {wom::CountMode::Kind::Brute, 0}).str()}};
        for (int k = 0; k < inst.agents(); ++k)
          counts_j["agent_" + std::to_string(k + 1)] = wom::count_strategies(inst, {wom::CountMode::Kind::Agent, k}).str();
        const wom::Comparison cmp = wom::compare_agents(inst, opt);
        digests.push_back(wom::io::digest(wom::io::instance_to_json(inst)));
        report["results"].push_back({{"instance", name}, {"counts", counts_j}, {"comparison", wom::io::to_json(cmp)}});
        timings[name] = seconds_since(ts);
        if (!json_out) {
          std::printf("== %s ==\nstrategy counts: brute %s", name.c_str(), counts_j["brute"].get<std::string>().c_str());
          for (int k = 0; k < inst.agents(); ++k)
            std::printf(" | agent %d: %s", k + 1, counts_j["agent_" + std::to_string(k + 1)].get<std::string>().c_str());
          std::printf("\n");
          print_results_table(cmp.rows);
          std::printf("consistent: %s (max gap %.3g)\n\n", cmp.consistent ? "yes" : "NO", cmp.max_gap);
        }
      }
      report["instance_digest"] = digests;
    } else {
      const auto tl = std::chrono::steady_clock::now();
      const Loaded in = load(instance_arg);
      timings["load"] = seconds_since(tl);
      const wom::Instance& inst = in.inst;
      const int K = inst.agents();
      const int T = inst.horizon();
      report["instance_digest"] = in.digest;
      const auto tr = std::chrono::steady_clock::now();

      if (*validate) {
        report["command"] = "validate";
        report["results"] = {{"valid", true}, {"agents", K}, {"horizon", T}, {"state_size", inst.system.state_size}};
        if (!json_out) std::printf("%s: valid (%d agents, horizon %d, %d states)\n", in.source.c_str(), K, T, inst.system.state_size);
      } else if (*delays) {
        report["command"] = "delays";
        json paths = json::array();
        for (int k = 0; k < K; ++k)
          for (int j = 0; j < K; ++j) {
            const wom::InfoPath p = wom::information_path(inst.network, k, j);
            json seq = json::array();
            for (int a : p.agents) seq.push_back(a + 1);
            paths.push_back({{"from", k + 1}, {"to", j + 1}, {"path", seq}, {"delay", p.total_delay}});
          }
        report["results"] = {{"delays", wom::io::to_json(inst.delays)}, {"paths", paths}};
        if (!json_out) {
          std::printf("d[from][to]\n     ");
          for (int j = 0; j < K; ++j) std::printf("%4d", j + 1);
          std::printf("\n");
          for (int k = 0; k < K; ++k) {
            std::printf("%4d ", k + 1);
            for (int j = 0; j < K; ++j) std::printf("%4d", inst.delays(k, j));
            std::printf("\n");
          }
        }
      } else if (*schema) {
        report["command"] = "schema";
        json rows = json::array();
        for (int t = 0; t <= T; ++t) {
          if (time >= 0 && t != time) continue;
          for (int k = 0; k < K; ++k) {
            json inacc = json::object();
            for (int i = k; i < K; ++i) inacc[std::to_string(i + 1)] = wom::io::to_json(inst.info.inaccessible(t, k, i));
            rows.push_back({{"time", t},
                            {"agent", k + 1},
                            {"memory", wom::io::to_json(inst.info.memory(t, k))},
                            {"accessible", wom::io::to_json(inst.info.accessible(t, k))},
                            {"inaccessible", inacc},
                            {"new_info", wom::io::to_json(inst.info.new_info(t, k))},
                            {"equivalent_state", wom::io::to_json(inst.info.equivalent_state(t, k))}});
            if (!json_out) {
              std::printf("t=%d agent %d\n  M = %s\n  A = %s\n", t, k + 1, wom::to_string(inst.info.memory(t, k)).c_str(),
                          wom::to_string(inst.info.accessible(t, k)).c_str());
              for (int i = k; i < K; ++i)
                std::printf("  L[%d,%d] = %s\n", k + 1, i + 1, wom::to_string(inst.info.inaccessible(t, k, i)).c_str());
              std::printf("  Z = %s\n  S = {X} + %s\n", wom::to_string(inst.info.new_info(t, k)).c_str(),
                          wom::to_string(inst.info.equivalent_state(t, k)).c_str());
            }
          }
        }
        report["results"] = rows;
      } else if (*counts) {
        report["command"] = "counts";
        json c = {{"brute", wom::count_strategies(inst, {wom::CountMode::Kind::Brute, 0}).str()}};
        if (!json_out) std::printf("brute force: %s\n", c["brute"].get<std::string>().c_str());
        for (int k = 0; k < K; ++k) {
          const std::string n = wom::count_strategies(inst, {wom::CountMode::Kind::Agent, k}).str();
          c["agent_" + std::to_string(k + 1)] = n;
          if (!json_out) std::printf("agent %d: %s\n", k + 1, n.c_str());
        }
        report["results"] = c;
      } else if (*solve) {
        report["command"] = "solve";
        if (agent_opt->count() > 0 && method != "prescription")
          throw wom::Error(wom::ErrorKind::Parse, "--agent applies only to --method prescription");
        if (method == "prescription" && agent_opt->count() == 0)
          throw wom::Error(wom::ErrorKind::Parse, "--method prescription needs --agent");
        if (method == "prescription" && (agent < 1 || agent > K))
          throw wom::Error(wom::ErrorKind::Parse, "--agent must be between 1 and " + std::to_string(K));
        const wom::SolveResult r = method == "brute"         ? wom::solve_brute_force(inst, opt)
                                   : method == "common-info" ? wom::solve_common_info_dp(inst, opt)
                                                             : wom::solve_prescription(inst, agent - 1, opt);
        report["results"] = wom::io::to_json(r);
        if (!emit_strategy.empty()) write_json(emit_strategy, wom::io::to_json(r, true));
        if (!emit_beliefs.empty()) write_json(emit_beliefs, {{"agent", K}, {"beliefs", beliefs_json(r)}});
        if (!json_out) print_results_table({wom::ComparisonRow{r.method, r.agent, true, "", r}});
      } else if (*evaluate) {
        report["command"] = "evaluate";
        const wom::CostReport c = wom::exact_strategy_cost(inst, strategy_arg(inst, strategy_path));
        report["results"] = wom::io::to_json(c);
        if (!json_out) {
          std::printf("expected cost %.12f\n", c.expected_cost);
          for (size_t t = 0; t < c.per_stage_costs.size(); ++t) std::printf("  t=%zu  %.12f\n", t, c.per_stage_costs[t]);
        }
      } else if (*simulate) {
        report["command"] = "simulate";
        const wom::CostReport c = wom::monte_carlo_cost(inst, strategy_arg(inst, strategy_path), samples, seed);
        report["results"] = wom::io::to_json(c);
        if (!json_out)
          std::printf("estimate %.9f  stderr %.9f  (%llu samples, seed %llu)\n", c.expected_cost, c.stderr_,
                      static_cast<unsigned long long>(c.sample_count), static_cast<unsigned long long>(c.seed));
      } else if (*compare) {
        report["command"] = "compare";
        const wom::Comparison cmp = wom::compare_agents(inst, opt);
        report["results"] = wom::io::to_json(cmp);
        if (!json_out) {
          print_results_table(cmp.rows);
          std::printf("consistent: %s (max gap %.3g)\n", cmp.consistent ? "yes" : "NO", cmp.max_gap);
        }
      }
      timings["run"] = seconds_since(tr);
    }
    timings["total"] = seconds_since(t0);
    report["timings"] = timings;
    if (json_out) std::cout << report.dump(2) << "\n";
    if (!report_path.empty()) write_json(report_path, report);
    return 0;
  } catch (const wom::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == wom::ErrorKind::CapExceeded) return 2;
    if (e.kind() == wom::ErrorKind::Parse) return 1;
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
