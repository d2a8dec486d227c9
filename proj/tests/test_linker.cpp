#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "checks.hpp"
#include "popweave/bn_io.hpp"
#include "popweave/error.hpp"
#include "popweave/linker.hpp"
#include "popweave/netmetrics.hpp"
#include "popweave/population.hpp"
#include "support.hpp"

using namespace popweave;

namespace {

struct Toy {
  LoadedScenario scenario = load_scenario(testing_support::fixture("toy/toy.scenario.json"));
  std::size_t role = scenario.agent_bn.index_of("role");
  std::size_t x = scenario.agent_bn.index_of("X");

  // Agents given as (role, X) state pairs; every capacity is 1.
  Population population(const std::vector<std::pair<int, int>>& agents) const {
    Population pop;
    const auto caps = scenario.capacities();
    for (std::size_t i = 0; i < agents.size(); ++i) {
      Agent a;
      a.id = static_cast<AgentId>(i);
      a.attributes.assign(scenario.agent_bn.size(), 0);
      a.attributes[role] = agents[i].first;
      a.attributes[x] = agents[i].second;
      a.capacity = read_capacities(scenario.agent_bn, a.attributes, caps, a.id);
      a.remaining_capacity = a.capacity;
      pop.agents.push_back(a);
    }
    return pop;
  }

  MatchingModel model(std::size_t type) const {
    const auto& spec = scenario.config.link_types[type];
    return MatchingModel(scenario.agent_bn, *scenario.matching_bns[type], spec.link_variable);
  }

  MatchingModel model_from(const std::string& file) const {
    return MatchingModel(scenario.agent_bn, load_bn(testing_support::fixture("toy/" + file)), "link");
  }
};

// Largest set of role-a -> role-b pairs with equal X, one link per agent.
std::size_t brute_max_matching(const std::vector<std::pair<int, int>>& agents) {
  std::vector<std::size_t> a_side, b_side;
  for (std::size_t i = 0; i < agents.size(); ++i) (agents[i].first == 0 ? a_side : b_side).push_back(i);
  std::vector<bool> used(agents.size(), false);
  std::function<std::size_t(std::size_t)> best = [&](std::size_t k) -> std::size_t {
    if (k == a_side.size()) return 0;
    std::size_t result = best(k + 1);
    for (auto b : b_side) {
      if (used[b] || agents[b].second != agents[a_side[k]].second) continue;
      used[b] = true;
      result = std::max(result, 1 + best(k + 1));
      used[b] = false;
    }
    return result;
  };
  return best(0);
}

LoadedScenario& kenya() {
  static LoadedScenario s = load_scenario(testing_support::kenya_scenario());
  return s;
}

}  // namespace

TEST(CandidateSets, EqualityToyKeepsEveryone) {
  Toy toy;
  auto pop = toy.population({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  auto sets = derive_candidate_sets(toy.model_from("equality.bn.json"), pop);
  EXPECT_EQ(sets.side_a, (std::vector<AgentId>{0, 1, 2, 3}));
  EXPECT_EQ(sets.side_b, (std::vector<AgentId>{0, 1, 2, 3}));
}

TEST(CandidateSets, UnconstrainedKeepsEveryone) {
  Toy toy;
  auto pop = toy.population({{0, 0}, {1, 0}, {0, 1}});
  auto sets = derive_candidate_sets(toy.model_from("free.bn.json"), pop);
  EXPECT_EQ(sets.side_a.size(), 3u);
  EXPECT_EQ(sets.side_b.size(), 3u);
}

TEST(CandidateSets, RolesSplitSides) {
  Toy toy;
  auto pop = toy.population({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  auto sets = derive_candidate_sets(toy.model(0), pop);
  EXPECT_EQ(sets.side_a, (std::vector<AgentId>{0, 2}));
  EXPECT_EQ(sets.side_b, (std::vector<AgentId>{1, 3}));
}

TEST(CandidateSets, SpousesSideAHasNoWomen) {
  auto& s = kenya();
  auto pop = generate_population(s.agent_bn, 3000, 21, s.capacities());
  MatchingModel model(s.agent_bn, *s.matching_bns[0], "linkSpouses");
  auto sets = derive_candidate_sets(model, pop);
  const auto gender = s.agent_bn.index_of("gender");
  const auto married = s.agent_bn.index_of("married");
  ASSERT_FALSE(sets.side_a.empty());
  ASSERT_FALSE(sets.side_b.empty());
  for (auto id : sets.side_a) {
    EXPECT_EQ(s.agent_bn.variable(gender).domain[static_cast<std::size_t>(pop[id].attributes[gender])], "male");
  }
  for (auto id : sets.side_b) {
    EXPECT_EQ(s.agent_bn.variable(gender).domain[static_cast<std::size_t>(pop[id].attributes[gender])], "female");
    EXPECT_EQ(s.agent_bn.variable(married).domain[static_cast<std::size_t>(pop[id].attributes[married])], "yes");
  }
}

TEST(CandidateSets, UnsatisfiableThrows) {
  auto s = load_scenario(testing_support::fixture("unsatisfiable/unsatisfiable.scenario.json"));
  MatchingModel model(s.agent_bn, *s.matching_bns[0], "link");
  EXPECT_FALSE(model.satisfiable());
  auto pop = generate_population(s.agent_bn, 10, 1, s.capacities());
  EXPECT_THROW(derive_candidate_sets(model, pop), UnsatisfiableLinkType);
}

TEST(Prototype, EqualityForcesValue) {
  Toy toy;
  auto model = toy.model_from("equality.bn.json");
  auto pop = toy.population({{0, 0}, {0, 1}});
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(sample_peer_prototype(model, toy.scenario.agent_bn, pop[0], rng).at("X"), "0");
    EXPECT_EQ(sample_peer_prototype(model, toy.scenario.agent_bn, pop[1], rng).at("X"), "1");
  }
}

TEST(Prototype, UnconstrainedFollowsPrior) {
  Toy toy;
  auto model = toy.model_from("free.bn.json");
  auto pop = toy.population({{0, 0}});
  Rng rng(6);
  const int n = 100'000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_peer_prototype(model, toy.scenario.agent_bn, pop[0], rng).at("X") == "1";
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.7, 0.01);
}

TEST(Prototype, IncompatibleAgentHasNoPrototype) {
  Toy toy;
  auto pop = toy.population({{1, 0}});
  Rng rng(7);
  EXPECT_THROW(sample_peer_prototype(toy.model(0), toy.scenario.agent_bn, pop[0], rng), ImpossibleEvidence);
}

TEST(Prototype, SpousesAgeStaysInSupport) {
  auto& s = kenya();
  auto pop = generate_population(s.agent_bn, 2000, 22, s.capacities());
  MatchingModel model(s.agent_bn, *s.matching_bns[0], "linkSpouses");
  auto sets = derive_candidate_sets(model, pop);
  Rng rng(8);
  const auto& mbn = model.network();
  for (std::size_t k = 0; k < 200 && k < sets.side_a.size(); ++k) {
    const auto& husband = pop[sets.side_a[k]];
    auto proto = sample_peer_prototype(model, s.agent_bn, husband, rng);
    Evidence ev{{"rightAge", "yes"}, {"a2.ageSlices", proto.at("ageSlices")}};
    const auto age = s.agent_bn.index_of("ageSlices");
    ev["a1.ageSlices"] = s.agent_bn.variable(age).domain[static_cast<std::size_t>(husband.attributes[age])];
    EXPECT_GT(probability_of_evidence(mbn, ev), 0.0);
    EXPECT_EQ(proto.at("gender"), "female");
  }
}

TEST(CreateLinks, ExactCoverToy) {
  Toy toy;
  const std::vector<std::pair<int, int>> agents{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto pop = toy.population(agents);
  LinkSet links(true);
  Rng rng(1);
  auto model = toy.model(0);
  auto stats = create_links_for_type(toy.scenario.config.link_types[0], 0, model, pop, links, rng);
  EXPECT_EQ(brute_max_matching(agents), 2u);
  EXPECT_EQ(stats.required, 2u);
  EXPECT_EQ(stats.created, 2u);
  EXPECT_EQ(stats.orphans, 0u);
  EXPECT_EQ(stats.error_rate(), 0.0);
  EXPECT_TRUE(links.contains(0, 2));
  EXPECT_TRUE(links.contains(1, 3));
}

TEST(CreateLinks, EmptySideB) {
  Toy toy;
  auto pop = toy.population({{0, 0}, {0, 1}, {0, 0}});
  LinkSet links(true);
  Rng rng(1);
  auto model = toy.model(0);
  auto stats = create_links_for_type(toy.scenario.config.link_types[0], 0, model, pop, links, rng);
  EXPECT_EQ(stats.created, 0u);
  EXPECT_EQ(stats.orphans, stats.required);
  EXPECT_EQ(stats.required, 3u);
  EXPECT_EQ(stats.error_rate(), 1.0);
  EXPECT_EQ(matching_error(MatchingReport{{stats}})[0], 1.0);
}

// Greedy matching on the equality toy reaches the brute-force optimum.
TEST(Properties, ToyMatchesBruteForceOptimum) {
  Toy toy;
  Rng gen(2024);
  auto model = toy.model(0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(gen, 7);
    std::vector<std::pair<int, int>> agents;
    for (std::size_t i = 0; i < n; ++i) {
      agents.emplace_back(static_cast<int>(uniform_index(gen, 2)), static_cast<int>(uniform_index(gen, 2)));
    }
    auto pop = toy.population(agents);
    LinkSet links(true);
    Rng rng(static_cast<std::uint64_t>(trial));
    auto stats = create_links_for_type(toy.scenario.config.link_types[0], 0, model, pop, links, rng);
    EXPECT_EQ(stats.created, brute_max_matching(agents)) << "trial " << trial;
    EXPECT_EQ(stats.created + stats.orphans, stats.required);
    EXPECT_EQ(stats.fallbacks, 0u);
  }
}

TEST(CreateLinks, PooledTypeCountsHalfTheStubs) {
  Toy toy;
  // Pool of five agents with X=0 (one link each) and one with X=1.
  auto pop = toy.population({{0, 0}, {1, 0}, {0, 0}, {1, 0}, {0, 0}, {0, 1}});
  LinkSet links(false);
  Rng rng(3);
  auto model = toy.model(1);
  auto stats = create_links_for_type(toy.scenario.config.link_types[1], 1, model, pop, links, rng);
  EXPECT_EQ(stats.required, 3u);
  EXPECT_EQ(stats.created, 2u);
  EXPECT_EQ(stats.orphans, 2u);  // one X=0 stub and the lone X=1 stub
  for (const auto& l : links.links()) {
    EXPECT_LT(l.a, l.b);
    EXPECT_EQ(pop[l.a].attributes[toy.x], pop[l.b].attributes[toy.x]);
  }
}

TEST(RunAll, KenyaSpousesNeverDoubleBookWives) {
  auto& s = kenya();
  auto [graph, report] = run_all_matching(s, generate_population(s.agent_bn, 5000, 31, s.capacities()), 31);
  const auto gender = s.agent_bn.index_of("gender");
  std::vector<int> wife_links(graph.node_count(), 0);
  for (const auto& l : graph.links[0].links()) {
    for (auto id : {l.a, l.b}) {
      if (s.agent_bn.variable(gender).domain[static_cast<std::size_t>(graph.population[id].attributes[gender])] == "female") {
        ++wife_links[id];
      }
    }
  }
  EXPECT_LE(*std::max_element(wife_links.begin(), wife_links.end()), 1);
  auto audit = testing_support::audit_capacities(s, graph);
  EXPECT_EQ(audit.violations, 0u);
  EXPECT_EQ(audit.negative_remaining, 0u);
  ASSERT_EQ(report.types.size(), 4u);
  for (std::size_t k = 0; k < report.types.size(); ++k) {
    const auto& t = report.types[k];
    EXPECT_LE(t.created, t.required);
    if (s.config.link_types[k].same) {
      // Pooled stubs: two per link, demand possibly odd.
      const auto stubs = 2 * t.created + t.orphans;
      EXPECT_TRUE(stubs == 2 * t.required || stubs == 2 * t.required + 1) << t.type;
    } else {
      EXPECT_EQ(t.created + t.orphans, t.required) << t.type;
    }
  }
}

TEST(RunAll, KenyaLinksAreCompatible) {
  auto& s = kenya();
  auto [graph, report] = run_all_matching(s, generate_population(s.agent_bn, 4000, 32, s.capacities()), 32);
  std::size_t checked = 0, fallbacks = 0;
  for (std::size_t t = 0; t < graph.links.size(); ++t) {
    std::set<std::pair<AgentId, AgentId>> seen;
    for (const auto& l : graph.links[t].links()) {
      ASSERT_NE(l.a, l.b);
      if (!graph.types[t].directed) {
        EXPECT_LT(l.a, l.b);
      }
      EXPECT_TRUE(seen.insert({l.a, l.b}).second);
      EXPECT_TRUE(testing_support::link_supported(s, graph, l)) << graph.types[t].name;
      fallbacks += l.provenance == Provenance::fallback;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
  EXPECT_GT(fallbacks, 0u);
}

TEST(RunAll, Deterministic) {
  auto& s = kenya();
  auto caps = s.capacities();
  auto r1 = run_all_matching(s, generate_population(s.agent_bn, 3000, 5, caps), 5);
  auto r2 = run_all_matching(s, generate_population(s.agent_bn, 3000, 5, caps), 5);
  for (std::size_t t = 0; t < r1.first.links.size(); ++t) {
    const auto& a = r1.first.links[t].links();
    const auto& b = r2.first.links[t].links();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].a, b[k].a);
      EXPECT_EQ(a[k].b, b[k].b);
      EXPECT_EQ(a[k].provenance, b[k].provenance);
    }
  }
}

TEST(RunAll, UnsatisfiableTypeIsIsolated) {
  auto s = load_scenario(testing_support::fixture("unsatisfiable/unsatisfiable.scenario.json"));
  auto [graph, report] = run_all_matching(s, generate_population(s.agent_bn, 200, 3, s.capacities()), 3);
  ASSERT_EQ(report.types.size(), 2u);
  EXPECT_TRUE(report.types[0].unsatisfiable);
  EXPECT_EQ(report.types[0].error_rate(), 1.0);
  EXPECT_EQ(graph.links[0].size(), 0u);
  EXPECT_FALSE(report.types[1].unsatisfiable);
  EXPECT_EQ(report.types[1].created, 200u);  // every agent accepts one mentor
}

TEST(RunAll, DeclarationOrderPermuted) {
  Toy toy;
  auto reversed = toy.scenario;
  std::swap(reversed.config.link_types[0], reversed.config.link_types[1]);
  std::swap(reversed.matching_bns[0], reversed.matching_bns[1]);
  const std::vector<std::pair<int, int>> agents{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}, {1, 1}};
  auto forward = run_all_matching(toy.scenario, toy.population(agents), 9);
  Toy rtoy;
  rtoy.scenario = reversed;
  auto backward = run_all_matching(reversed, rtoy.population(agents), 9);
  ASSERT_EQ(forward.second.types.size(), 2u);
  EXPECT_EQ(forward.second.types[0].type, "pairs");
  EXPECT_EQ(backward.second.types[0].type, "alike");
  // Capacities are per type, so on this toy both orders reach the optimum.
  EXPECT_EQ(forward.second.types[0].created, backward.second.types[1].created);
  EXPECT_EQ(forward.second.types[0].created, brute_max_matching(agents));
}

TEST(Stats, ErrorRateWithNothingRequired) {
  TypeMatchingStats stats;
  EXPECT_EQ(stats.error_rate(), 0.0);
  stats.required = 4;
  stats.created = 3;
  EXPECT_DOUBLE_EQ(stats.error_rate(), 0.25);
}

TEST(LinkSetTest, CanonicalAndDeduplicated) {
  LinkSet undirected(false);
  EXPECT_TRUE(undirected.insert({0, 5, 2, Provenance::sampled}));
  EXPECT_FALSE(undirected.insert({0, 2, 5, Provenance::sampled}));
  EXPECT_FALSE(undirected.insert({0, 3, 3, Provenance::sampled}));
  EXPECT_EQ(undirected.links()[0].a, 2u);
  EXPECT_TRUE(undirected.contains(5, 2));
  LinkSet directed(true);
  EXPECT_TRUE(directed.insert({0, 5, 2, Provenance::sampled}));
  EXPECT_TRUE(directed.insert({0, 2, 5, Provenance::sampled}));
  EXPECT_FALSE(directed.contains(1, 2));
}
