#include <functional>

#include <gtest/gtest.h>

#include "popweave/bn_io.hpp"
#include "popweave/error.hpp"
#include "popweave/scenario.hpp"
#include "support.hpp"

using namespace popweave;
using testing_support::TempDir;

namespace {

void expect_same_network(const BayesianNetwork& a, const BayesianNetwork& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.variable(i);
    const auto& y = b.variable(i);
    EXPECT_EQ(x.name, y.name);
    EXPECT_EQ(x.domain, y.domain);
    EXPECT_EQ(x.parents, y.parents);
    ASSERT_EQ(x.cpt.rows(), y.cpt.rows());
    ASSERT_EQ(x.cpt.cols(), y.cpt.cols());
    EXPECT_LE((x.cpt - y.cpt).cwiseAbs().maxCoeff(), 1e-12) << x.name;
  }
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

const char* kAgent = R"({"format_version": 1, "variables": [
  {"name": "gender", "domain": ["male", "female"], "parents": [], "cpt": [[0.5, 0.5]]},
  {"name": "location", "domain": ["north", "south"], "parents": [], "cpt": [[0.4, 0.6]]},
  {"name": "RC_ties", "domain": ["0", "1", "2"], "parents": ["gender"],
   "cpt": [[0.2, 0.5, 0.3], [0.1, 0.6, 0.3]]}
]})";

const char* kMatching = R"({"format_version": 1, "variables": [
  {"name": "a1.gender", "domain": ["male", "female"], "parents": [], "cpt": [[0.5, 0.5]]},
  {"name": "a2.gender", "domain": ["male", "female"], "parents": [], "cpt": [[0.5, 0.5]]},
  {"name": "link", "domain": ["yes", "no"], "parents": ["a1.gender", "a2.gender"],
   "cpt": [[0, 1], [1, 0], [1, 0], [0, 1]]}
]})";

std::string scenario_text(const std::string& link_type) {
  return R"({"format_version": 1, "agent_bn": "agent.bn.json", "population_size": 10,
    "seed": 1, "link_types": [)" + link_type + "]}";
}

}  // namespace

TEST(ParseBn, TinyFixture) {
  auto bn = load_bn(testing_support::fixture("tiny.bn.json"));
  ASSERT_EQ(bn.size(), 2u);
  EXPECT_EQ(topological_names(bn), (std::vector<std::string>{"A", "B"}));
  expect_same_network(bn, testing_support::tiny_bn());
}

TEST(ParseBn, WrongRowLengthNamesVariable) {
  auto msg = message_of([] {
    parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0", "1"], "parents": [], "cpt": [[0.6, 0.4]]},
      {"name": "Shape", "domain": ["0", "1"], "parents": ["A"], "cpt": [[0.7, 0.3], [1.0]]}]})");
  });
  EXPECT_NE(msg.find("shape"), std::string::npos) << msg;
  EXPECT_NE(msg.find("Shape"), std::string::npos) << msg;
}

TEST(ParseBn, WrongRowCountIsShapeError) {
  EXPECT_THROW(parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0", "1"], "parents": [], "cpt": [[0.6, 0.4]]},
      {"name": "B", "domain": ["0", "1"], "parents": ["A"], "cpt": [[0.7, 0.3]]}]})"),
               ParseError);
}

TEST(ParseBn, ParentsResolveRegardlessOfOrder) {
  auto bn = parse_bn(R"({"format_version": 1, "variables": [
    {"name": "married", "domain": ["yes", "no"], "parents": ["ageSlices"],
     "cpt": [[0.1, 0.9], [0.7, 0.3]]},
    {"name": "ageSlices", "domain": ["young", "old"], "parents": [], "cpt": [[0.5, 0.5]]}]})");
  EXPECT_EQ(topological_names(bn), (std::vector<std::string>{"ageSlices", "married"}));
}

TEST(ParseBn, RejectsMalformedInput) {
  EXPECT_THROW(parse_bn("{\"variables\": ["), ParseError);
  EXPECT_THROW(parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0"], "parents": [], "cpt": [[1.0]], "colour": "red"}]})"),
               ParseError);
  EXPECT_THROW(parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0"], "parents": [], "cpt": [[1.0]]},
      {"name": "A", "domain": ["0"], "parents": [], "cpt": [[1.0]]}]})"),
               ParseError);
  EXPECT_THROW(parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0", "1"], "parents": [], "cpt": [[0.7, 0.4]]}]})"),
               ParseError);
  EXPECT_THROW(parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0"], "parents": ["B"], "cpt": [[1.0]]},
      {"name": "B", "domain": ["0"], "parents": ["A"], "cpt": [[1.0]]}]})"),
               ParseError);
}

TEST(ParseBn, MalformedErrorCarriesPosition) {
  auto msg = message_of([] { parse_bn("{\n  \"variables\": [,]\n}"); });
  EXPECT_NE(msg.find("byte"), std::string::npos) << msg;
}

TEST(ParseBn, NearlyNormalizedRowsAreRenormalized) {
  auto bn = parse_bn(R"({"format_version": 1, "variables": [
      {"name": "A", "domain": ["0", "1"], "parents": [], "cpt": [[0.6, 0.4000000002]]}]})");
  EXPECT_NEAR(bn.variable(0).cpt.row(0).sum(), 1.0, 1e-15);
}

TEST(SerializeBn, RoundTripTiny) {
  auto bn = testing_support::tiny_bn();
  expect_same_network(parse_bn(serialize_bn(bn)), bn);
}

TEST(SerializeBn, ZerosPreservedExactly) {
  BayesianNetwork bn({{"A", {"0", "1", "2"}, {}, testing_support::rows({{0.0, 0.25, 0.75}})}});
  auto back = parse_bn(serialize_bn(bn));
  EXPECT_EQ(back.variable(0).cpt(0, 0), 0.0);
  EXPECT_EQ(back.variable(0).cpt(0, 2), 0.75);
}

TEST(SerializeBn, RootEmitsOneRow) {
  auto text = serialize_bn(testing_support::tiny_bn());
  auto back = parse_bn(text);
  EXPECT_EQ(back.variable(0).cpt.rows(), 1);
}

TEST(SerializeBn, RoundTripRandomNetworks) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto bn = testing_support::random_bn(rng);
    auto text = serialize_bn(bn);
    auto back = parse_bn(text);
    expect_same_network(back, bn);
    EXPECT_EQ(serialize_bn(back), text);
  }
}

TEST(Scenario, BundledKenya) {
  auto scenario = load_scenario(testing_support::kenya_scenario());
  std::size_t matching = 0, transitive = 0;
  for (const auto& t : scenario.config.link_types) {
    (t.kind == LinkKind::matching ? matching : transitive)++;
  }
  EXPECT_EQ(matching, 4u);
  EXPECT_EQ(transitive, 3u);
  EXPECT_EQ(scenario.config.transitive_rules.size(), 3u);
  EXPECT_TRUE(validate_network(scenario.agent_bn).ok());
  for (std::size_t t = 0; t < scenario.config.link_types.size(); ++t) {
    EXPECT_EQ(scenario.matching_bns[t].has_value(),
              scenario.config.link_types[t].kind == LinkKind::matching);
  }
  ASSERT_TRUE(scenario.agent_bn.find("ageSlices").has_value());
  // Reduced copies: the spouses network leaves out the work attribute.
  const auto& spouses = *scenario.matching_bns[0];
  EXPECT_FALSE(spouses.find("a2.work").has_value());
}

TEST(Scenario, UnusedAttributesArePermitted) {
  TempDir dir;
  dir.write("agent.bn.json", kAgent);
  dir.write("match.bn.json", kMatching);
  auto s = parse_scenario(scenario_text(R"({"name": "ties", "kind": "matching", "bn": "match.bn.json",
      "link_variable": "link", "rc_a": "RC_ties", "rc_b": "RC_ties"})"),
                          dir.path());
  ASSERT_EQ(s.config.link_types.size(), 1u);
  EXPECT_EQ(s.config.link_types[0].rc_a.attribute, "RC_ties");
}

TEST(Scenario, LinkVariableWithoutYes) {
  TempDir dir;
  dir.write("agent.bn.json", kAgent);
  std::string m = kMatching;
  m.replace(m.find("[\"yes\", \"no\"]"), 13, "[\"0\", \"1\"]");
  dir.write("match.bn.json", m);
  EXPECT_THROW(parse_scenario(scenario_text(R"({"name": "ties", "kind": "matching",
      "bn": "match.bn.json", "link_variable": "link", "rc_a": "RC_ties", "rc_b": 1})"),
                              dir.path()),
               ConfigError);
}

TEST(Scenario, DomainMismatchNamesVariable) {
  TempDir dir;
  dir.write("agent.bn.json", kAgent);
  std::string m = kMatching;
  const std::string from = R"("a2.gender", "domain": ["male", "female"])";
  m.replace(m.find(from), from.size(), R"("a2.gender", "domain": ["female", "male"])");
  dir.write("match.bn.json", m);
  auto msg = message_of([&] {
    parse_scenario(scenario_text(R"({"name": "ties", "kind": "matching", "bn": "match.bn.json",
        "link_variable": "link", "rc_a": "RC_ties", "rc_b": 1})"),
                   dir.path());
  });
  EXPECT_NE(msg.find("a2.gender"), std::string::npos) << msg;
}

TEST(Scenario, CapacityAttributeMustBeInteger) {
  TempDir dir;
  dir.write("agent.bn.json", kAgent);
  dir.write("match.bn.json", kMatching);
  EXPECT_THROW(parse_scenario(scenario_text(R"({"name": "ties", "kind": "matching",
      "bn": "match.bn.json", "link_variable": "link", "rc_a": "location", "rc_b": 1})"),
                              dir.path()),
               ConfigError);
  EXPECT_THROW(parse_scenario(scenario_text(R"({"name": "ties", "kind": "matching",
      "bn": "match.bn.json", "link_variable": "link", "rc_a": "nothing", "rc_b": 1})"),
                              dir.path()),
               ConfigError);
}

TEST(Scenario, MissingFileNamesPath) {
  auto msg = message_of([] {
    load_scenario(testing_support::fixture("broken/missing.scenario.json"));
  });
  EXPECT_NE(msg.find("no_such_agent.bn.json"), std::string::npos) << msg;
}

TEST(Scenario, CrossReferenceChecks) {
  const std::string head = R"({"format_version": 1, "agent_bn": "a.bn.json", "population_size": 5,
      "seed": 2, "link_types": [
        {"name": "friends", "kind": "matching", "bn": "f.bn.json", "link_variable": "link",
         "rc_a": "RC", "same": true},
        {"name": "fof", "kind": "transitive"}], )";
  EXPECT_NO_THROW(parse_scenario_config(head + R"("transitive_rules": [
      {"create": "fof", "hop1": {"type": "friends"}, "hop2": {"type": "friends"},
       "probability": 0.5}]})"));
  EXPECT_THROW(parse_scenario_config(head + R"("transitive_rules": [
      {"create": "fof", "hop1": {"type": "enemies"}, "hop2": {"type": "friends"},
       "probability": 0.5}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario_config(head + R"("transitive_rules": [
      {"create": "fof", "hop1": {"type": "friends"}, "hop2": {"type": "friends"},
       "probability": 1.5}]})"),
               Error);
  // Rules may add to a matched type; capacities do not bound them.
  EXPECT_NO_THROW(parse_scenario_config(head + R"("transitive_rules": [
      {"create": "friends", "hop1": {"type": "friends"}, "hop2": {"type": "friends"},
       "probability": 0.5}]})"));
  EXPECT_THROW(parse_scenario_config(head + R"("transitive_rules": [
      {"create": "ghosts", "hop1": {"type": "friends"}, "hop2": {"type": "friends"},
       "probability": 0.5}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario_config(R"({"format_version": 1, "agent_bn": "a.bn.json",
      "population_size": 5, "seed": 2, "link_types": [
        {"name": "x", "kind": "transitive"}, {"name": "x", "kind": "transitive"}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario_config(R"({"format_version": 1, "agent_bn": "a.bn.json",
      "population_size": 0, "seed": 2, "link_types": []})"),
               Error);
  EXPECT_THROW(parse_scenario_config(R"({"format_version": 1, "agent_bn": "a.bn.json",
      "population_size": 5, "seed": 2, "link_types": [
        {"name": "m", "kind": "matching", "rc_a": "RC"}]})"),
               Error);
  EXPECT_THROW(parse_scenario_config(R"({"format_version": 1, "agent_bn": "a.bn.json",
      "population_size": 5, "seed": 2, "link_types": [
        {"name": "t", "kind": "transitive", "bn": "x.bn.json"}]})"),
               Error);
}
