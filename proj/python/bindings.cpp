#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wom/bundled.hpp"
#include "wom/error.hpp"
#include "wom/io.hpp"
#include "wom/solver.hpp"

namespace py = pybind11;
using wom::io::json;

namespace {

// Instances cross the boundary as JSON text or bundled names; results come
// back as JSON text and are decoded on the Python side.
wom::Instance resolve(const std::string& source) {
  for (const std::string& name : wom::bundled::names())
    if (name == source) return wom::bundled::by_name(name);
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::exception& e) {
    throw wom::Error(wom::ErrorKind::Parse, std::string("instance is neither a bundled name nor JSON: ") + e.what());
  }
  return wom::io::parse_instance(doc);
}

wom::ControlStrategy strategy_or_zero(const wom::Instance& inst, const std::string& text) {
  if (text.empty()) return wom::zero_strategy(inst);
  return wom::io::control_strategy_from_json(json::parse(text));
}

std::string solve(const std::string& source, const std::string& method, int agent, uint64_t cap, bool with_strategy) {
  const wom::Instance inst = resolve(source);
  const wom::SolverOptions opt{cap ? cap : wom::kDefaultSolverCap};
  wom::SolveResult r;
  py::gil_scoped_release release;
  if (method == "brute")
    r = wom::solve_brute_force(inst, opt);
  else if (method == "common-info")
    r = wom::solve_common_info_dp(inst, opt);
  else if (method == "prescription") {
    if (agent < 1 || agent > inst.agents())
      throw wom::Error(wom::ErrorKind::Parse, "agent must be between 1 and " + std::to_string(inst.agents()));
    r = wom::solve_prescription(inst, agent - 1, opt);
  } else
    throw wom::Error(wom::ErrorKind::Parse, "unknown method '" + method + "'");
  return wom::io::to_json(r, with_strategy).dump();
}

}  // namespace

PYBIND11_MODULE(_wom, m) {
  m.doc() = "Exact solvers for decentralized control over delayed sharing networks";

  static py::exception<wom::Error> base(m, "WomError", PyExc_ValueError);
  static py::exception<wom::Error> capped(m, "CapExceeded", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const wom::Error& e) {
      if (e.kind() == wom::ErrorKind::CapExceeded)
        capped(e.what());
      else
        base(e.what());
    }
  });

  m.attr("DEFAULT_CAP") = wom::kDefaultSolverCap;
  m.def("bundled_names", &wom::bundled::names);
  m.def("bundled_json", [](const std::string& name) { return wom::io::instance_to_json(wom::bundled::by_name(name)).dump(); });
  m.def("validate", [](const std::string& source) { return wom::io::instance_to_json(resolve(source)).dump(); });
  m.def("digest", [](const std::string& source) { return wom::io::digest(wom::io::instance_to_json(resolve(source))); });
  m.def("delays", [](const std::string& source) { return wom::io::to_json(resolve(source).delays).dump(); });
  m.def("schema", [](const std::string& source, int t, int agent) {
    const wom::Instance inst = resolve(source);
    if (t < 0 || t > inst.horizon() || agent < 1 || agent > inst.agents())
      throw wom::Error(wom::ErrorKind::OutOfRange, "time or agent out of range");
    const int k = agent - 1;
    json inacc = json::object();
    for (int i = k; i < inst.agents(); ++i) inacc[std::to_string(i + 1)] = wom::io::to_json(inst.info.inaccessible(t, k, i));
    return json{{"memory", wom::io::to_json(inst.info.memory(t, k))},
                {"accessible", wom::io::to_json(inst.info.accessible(t, k))},
                {"inaccessible", inacc},
                {"new_info", wom::io::to_json(inst.info.new_info(t, k))},
                {"equivalent_state", wom::io::to_json(inst.info.equivalent_state(t, k))}}
        .dump();
  });
  m.def("counts", [](const std::string& source) {
    const wom::Instance inst = resolve(source);
    json c = {{"brute", wom::count_strategies(inst, {wom::CountMode::Kind::Brute, 0}).str()}};
    for (int k = 0; k < inst.agents(); ++k)
      c["agent_" + std::to_string(k + 1)] = wom::count_strategies(inst, {wom::CountMode::Kind::Agent, k}).str();
    return c.dump();
  });
  m.def("solve", &solve, py::arg("source"), py::arg("method"), py::arg("agent") = 0, py::arg("cap") = 0,
        py::arg("with_strategy") = false);
  m.def("evaluate", [](const std::string& source, const std::string& strategy) {
    const wom::Instance inst = resolve(source);
    return wom::io::to_json(wom::exact_strategy_cost(inst, strategy_or_zero(inst, strategy))).dump();
  });
  m.def("simulate", [](const std::string& source, const std::string& strategy, uint64_t samples, uint64_t seed) {
    const wom::Instance inst = resolve(source);
    return wom::io::to_json(wom::monte_carlo_cost(inst, strategy_or_zero(inst, strategy), samples, seed)).dump();
  });
  m.def("compare", [](const std::string& source, uint64_t cap) {
    const wom::Instance inst = resolve(source);
    const wom::Comparison c = wom::compare_agents(inst, {cap ? cap : wom::kDefaultSolverCap});
    return wom::io::to_json(c).dump();
  });
}
