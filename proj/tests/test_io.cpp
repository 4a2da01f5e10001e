#include <gtest/gtest.h>

#include "wom/bundled.hpp"
#include "wom/error.hpp"
#include "wom/io.hpp"

using namespace wom;
using io::json;

namespace {

std::string parse_error(const json& doc) {
  try {
    io::parse_instance(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "document parsed";
  return {};
}

}  // namespace

TEST(Io, BundledInstancesRoundTrip) {
  for (const auto& name : bundled::names()) {
    const Instance inst = bundled::by_name(name);
    const json doc = io::instance_to_json(inst);
    const Instance back = io::parse_instance(doc);
    EXPECT_EQ(back.delays, inst.delays) << name;
    EXPECT_EQ(io::instance_to_json(back), doc) << name;
    for (int t = 0; t <= inst.horizon(); ++t)
      for (int k = 0; k < inst.agents(); ++k) EXPECT_EQ(back.info.memory(t, k), inst.info.memory(t, k));
  }
}

TEST(Io, DigestIsStableAndSensitive) {
  const json a = io::instance_to_json(bundled::d2());
  const json b = json::parse(a.dump(2));
  EXPECT_EQ(io::digest(a), io::digest(b));
  EXPECT_EQ(io::digest(a).size(), 64u);
  json c = a;
  c["system"]["initial_probs"] = {0.5, 0.5};
  EXPECT_NE(io::digest(a), io::digest(c));
}

TEST(Io, AgentsAreOneBasedInDocuments) {
  const json doc = io::instance_to_json(bundled::d2());
  EXPECT_EQ(doc["network"]["links"][0]["from"], 1);
  EXPECT_EQ(io::to_json(Uv(1, 3)), (json{{"agent", 2}, {"kind", "U"}, {"time", 3}}));
}

TEST(Io, MissingFieldsAreNamed) {
  json doc = io::instance_to_json(bundled::d2());
  doc["system"].erase("initial_probs");
  EXPECT_NE(parse_error(doc).find("system.initial_probs"), std::string::npos);

  doc = io::instance_to_json(bundled::d2());
  doc["network"]["links"][1].erase("delay");
  EXPECT_NE(parse_error(doc).find("delay"), std::string::npos);

  doc = io::instance_to_json(bundled::d2());
  doc["system"]["horizon"] = "one";
  EXPECT_NE(parse_error(doc).find("system.horizon"), std::string::npos);
}

TEST(Io, ValidationKindsSurviveParsing) {
  json doc = io::instance_to_json(bundled::d2());
  doc["network"]["links"] = json::array({{{"from", 1}, {"to", 2}, {"delay", 1}}});
  try {
    io::parse_instance(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotStronglyConnected);
  }
}

TEST(Io, ControlStrategyRoundTrip) {
  const Instance inst = bundled::d2(2);
  ControlStrategy g = zero_strategy(inst);
  g.tables[1][0][3] = 1;
  EXPECT_EQ(io::control_strategy_from_json(io::to_json(g)).tables, g.tables);
}

TEST(Io, SolveResultCarriesBigCounts) {
  SolveResult r;
  r.method = "brute";
  r.search_size = BigInt(1) << 100;
  const json j = io::to_json(r);
  EXPECT_EQ(j["search_size"], "1267650600228229401496703205376");
  EXPECT_EQ(j["method"], "brute");
}
