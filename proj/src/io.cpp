#include "wom/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "wom/error.hpp"

namespace wom::io {

namespace {

template <class T>
T field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Parse, "missing field " + path + "." + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Parse, "field " + path + "." + key + " has the wrong type");
  }
}

PrimitiveSpec parse_primitive(const json& j, const std::string& path) {
  PrimitiveSpec p;
  p.size = field<int>(j, "size", path);
  if (!j.contains("probs_per_t") || !j["probs_per_t"].is_array() || j["probs_per_t"].empty())
    throw Error(ErrorKind::Parse, "field " + path + ".probs_per_t must be a non-empty array");
  const json& probs = j["probs_per_t"];
  try {
    if (probs.front().is_number())
      p.probs_per_t = {probs.get<std::vector<double>>()};
    else
      p.probs_per_t = probs.get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Parse, "field " + path + ".probs_per_t must hold numbers");
  }
  return p;
}

VariableId parse_variable(const json& j, const std::string& path) {
  VariableId v;
  v.agent = field<int>(j, "agent", path) - 1;
  const std::string kind = field<std::string>(j, "kind", path);
  if (kind == "Y")
    v.kind = VarKind::Y;
  else if (kind == "U")
    v.kind = VarKind::U;
  else
    throw Error(ErrorKind::Parse, "field " + path + ".kind must be \"Y\" or \"U\"");
  v.time = field<int>(j, "time", path);
  return v;
}

std::string hex(const unsigned char* data, unsigned len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned n = 0; n < len; ++n) {
    out.push_back(digits[data[n] >> 4]);
    out.push_back(digits[data[n] & 15]);
  }
  return out;
}

json prim_json(const PrimitiveSpec& p) {
  json probs = p.probs_per_t.size() == 1 ? json(p.probs_per_t.front()) : json(p.probs_per_t);
  return {{"size", p.size}, {"probs_per_t", probs}};
}

}  // namespace

Instance parse_instance(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "instance must be a JSON object");
  const json net = field<json>(doc, "network", "$");
  NetworkSpec network;
  network.agents = field<int>(net, "agents", "network");
  const json links = field<json>(net, "links", "network");
  if (!links.is_array()) throw Error(ErrorKind::Parse, "field network.links must be an array");
  for (size_t n = 0; n < links.size(); ++n) {
    const std::string path = "network.links[" + std::to_string(n) + "]";
    network.links.push_back({field<int>(links[n], "from", path) - 1, field<int>(links[n], "to", path) - 1,
                             field<int>(links[n], "delay", path)});
  }

  const json sj = field<json>(doc, "system", "$");
  SystemSpec sys;
  sys.horizon = field<int>(sj, "horizon", "system");
  sys.state_size = field<int>(sj, "state_size", "system");
  sys.control_sizes = field<std::vector<int>>(sj, "control_sizes", "system");
  sys.observation_sizes = field<std::vector<int>>(sj, "observation_sizes", "system");
  sys.disturbance = sj.contains("disturbance") ? parse_primitive(sj["disturbance"], "system.disturbance") : PrimitiveSpec{};
  const json noises = field<json>(sj, "noises", "system");
  if (!noises.is_array()) throw Error(ErrorKind::Parse, "field system.noises must be an array");
  for (size_t k = 0; k < noises.size(); ++k) sys.noises.push_back(parse_primitive(noises[k], "system.noises[" + std::to_string(k) + "]"));
  sys.initial_probs = field<std::vector<double>>(sj, "initial_probs", "system");
  if (sj.contains("transition"))
    sys.transition = field<std::vector<std::vector<std::vector<std::vector<int>>>>>(sj, "transition", "system");
  sys.observation = field<std::vector<std::vector<std::vector<std::vector<int>>>>>(sj, "observation", "system");
  sys.cost = field<std::vector<std::vector<std::vector<double>>>>(sj, "cost", "system");

  std::optional<std::vector<std::vector<InfoSchema>>> memories;
  if (doc.contains("information")) {
    const json mj = field<json>(doc["information"], "memories", "information");
    if (!mj.is_array()) throw Error(ErrorKind::Parse, "field information.memories must be an array");
    memories.emplace();
    for (size_t t = 0; t < mj.size(); ++t) {
      if (!mj[t].is_array()) throw Error(ErrorKind::Parse, "information.memories[" + std::to_string(t) + "] must be an array");
      std::vector<InfoSchema> stage;
      for (size_t k = 0; k < mj[t].size(); ++k) {
        InfoSchema s;
        for (size_t n = 0; n < mj[t][k].size(); ++n)
          s.push_back(parse_variable(mj[t][k][n], "information.memories[" + std::to_string(t) + "][" + std::to_string(k) +
                                                      "][" + std::to_string(n) + "]"));
        stage.push_back(make_schema(std::move(s)));
      }
      memories->push_back(std::move(stage));
    }
  }
  return validate_instance(std::move(sys), std::move(network), std::move(memories));
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + " is not valid JSON: " + e.what());
  }
  return parse_instance(doc);
}

json instance_to_json(const Instance& inst) {
  const SystemSpec& s = inst.system;
  json links = json::array();
  for (const Link& l : inst.network.links) links.push_back({{"from", l.from + 1}, {"to", l.to + 1}, {"delay", l.delay}});
  json noises = json::array();
  for (const PrimitiveSpec& p : s.noises) noises.push_back(prim_json(p));
  json doc = {
      {"network", {{"agents", inst.network.agents}, {"links", links}}},
      {"system",
       {{"horizon", s.horizon},
        {"state_size", s.state_size},
        {"control_sizes", s.control_sizes},
        {"observation_sizes", s.observation_sizes},
        {"disturbance", prim_json(s.disturbance)},
        {"noises", noises},
        {"initial_probs", s.initial_probs},
        {"transition", s.transition},
        {"observation", s.observation},
        {"cost", s.cost}}},
  };
  if (inst.memories) {
    json mem = json::array();
    for (const auto& stage : *inst.memories) {
      json st = json::array();
      for (const InfoSchema& m : stage) st.push_back(to_json(m));
      mem.push_back(st);
    }
    doc["information"] = {{"memories", mem}};
  }
  return doc;
}

std::string digest(const json& doc) {
  const std::string text = doc.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  return hex(md, len);
}

json to_json(const VariableId& v) {
  return {{"agent", v.agent + 1}, {"kind", v.kind == VarKind::Y ? "Y" : "U"}, {"time", v.time}};
}

json to_json(const InfoSchema& s) {
  json out = json::array();
  for (const VariableId& v : s) out.push_back(to_json(v));
  return out;
}

json to_json(const DelayMatrix& d) {
  json rows = json::array();
  for (int k = 0; k < d.size(); ++k) {
    json row = json::array();
    for (int j = 0; j < d.size(); ++j) row.push_back(d(k, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const CostReport& r) {
  json j = {{"expected_cost", r.expected_cost},
            {"per_stage_costs", r.per_stage_costs},
            {"method", r.method == CostReport::Method::Exact ? "exact" : "monte_carlo"}};
  if (r.method == CostReport::Method::MonteCarlo) {
    j["stderr"] = r.stderr_;
    j["sample_count"] = r.sample_count;
    j["seed"] = r.seed;
  }
  return j;
}

json to_json(const ControlStrategy& g) { return {{"tables", g.tables}}; }

ControlStrategy control_strategy_from_json(const json& j) {
  ControlStrategy g;
  g.tables = field<std::vector<std::vector<std::vector<int>>>>(j, "tables", "strategy");
  return g;
}

json to_json(const PrescriptionStrategy& psi) {
  json laws = json::array();
  for (size_t t = 0; t < psi.laws.size(); ++t)
    for (const PrescriptionLaw& law : psi.laws[t])
      laws.push_back({{"time", t},
                      {"target", law.target + 1},
                      {"conditioning", to_json(law.conditioning)},
                      {"domain", to_json(law.domain)},
                      {"tables", law.tables}});
  return {{"owner", psi.owner + 1}, {"laws", laws}};
}

json to_json(const InformationState& pi) {
  json support = json::array({"X"});
  for (const VariableId& v : pi.support) support.push_back(to_string(v));
  return {{"agent", pi.agent + 1}, {"time", pi.time}, {"support", support}, {"radices", pi.radices}, {"probs", pi.probs}};
}

json to_json(const SolveResult& r, bool with_strategy) {
  json j = {{"method", r.method},
            {"agent", r.agent >= 0 ? json(r.agent + 1) : json(nullptr)},
            {"optimal_cost", r.optimal_cost},
            {"search_value", r.search_value},
            {"search_size", r.search_size.str()},
            {"evaluated", r.evaluated},
            {"wall_time", r.wall_time}};
  if (r.separable_value) {
    j["separable_value"] = *r.separable_value;
    j["tail_conflict"] = r.tail_conflict;
  }
  if (with_strategy) {
    j["strategy"] = to_json(r.strategy);
    if (r.prescription) j["prescription_strategy"] = to_json(*r.prescription);
  }
  return j;
}

json to_json(const Comparison& c) {
  json rows = json::array();
  for (const ComparisonRow& row : c.rows) {
    json j = row.ok ? to_json(*row.result) : json{{"method", row.method}};
    j["agent"] = row.agent >= 0 ? json(row.agent + 1) : json(nullptr);
    j["status"] = row.ok ? "ok" : "cap_exceeded";
    if (!row.ok) j["error"] = row.error;
    rows.push_back(j);
  }
  return {{"rows", rows}, {"consistent", c.consistent}, {"max_gap", c.max_gap}};
}

}  // namespace wom::io
