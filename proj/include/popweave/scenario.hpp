#pragma once

#include "popweave/bayes_net.hpp"
#include "popweave/population.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace popweave {

enum class LinkKind { matching, transitive };
enum class Orientation { forward, backward, either };
enum class Endpoint { x, z };

/// Where a side's link capacity comes from: an agent attribute whose labels
/// parse as non-negative integers, or a constant.
struct CapacitySource {
  std::string attribute;
  int constant = 0;

  bool is_constant() const { return attribute.empty(); }
};

struct LinkTypeSpec {
  std::string name;
  LinkKind kind = LinkKind::matching;
  bool directed = false;
  std::string bn;  // matching kind only, relative to the scenario file
  std::string link_variable = "link";
  CapacitySource rc_a;
  CapacitySource rc_b;
  /// One candidate pool and one capacity attribute for both endpoints.
  bool same = false;
};

struct Hop {
  std::string type;
  Orientation orientation = Orientation::either;
};

/// Creates `create` links between x and z for every path x -hop1- y -hop2- z,
/// each candidate pair with probability `probability`.
struct TransitiveRule {
  std::string create;
  Hop hop1;
  Hop hop2;
  double probability = 1.0;
  Endpoint create_directed_from = Endpoint::x;
};

struct ScenarioConfig {
  std::string agent_bn;
  std::size_t population_size = 1;
  std::uint64_t seed = 0;
  std::vector<LinkTypeSpec> link_types;
  std::vector<TransitiveRule> transitive_rules;
  std::map<std::string, double> interaction_weights;

  std::optional<std::size_t> find_type(std::string_view name) const;
};

/// A scenario with every referenced network parsed and checked.
struct LoadedScenario {
  ScenarioConfig config;
  std::filesystem::path base_dir;
  BayesianNetwork agent_bn;
  /// Aligned with `config.link_types`; empty for transitive types.
  std::vector<std::optional<BayesianNetwork>> matching_bns;

  /// Capacity rules per link type, resolved against the agent network.
  std::vector<LinkCapacity> capacities() const;
};

/// Parses the scenario document alone (no file access). Throws `ParseError`
/// on malformed input and `ConfigError` on violated cross-references.
ScenarioConfig parse_scenario_config(std::string_view text);

/// Parses the document and loads every network it references from
/// `base_dir`. Matching networks must follow the binding contract: each
/// `a1.X` / `a2.X` variable names an agent attribute X with an identical
/// domain, and `link_variable` has a "yes" label. Capacity attributes must
/// have integer labels.
LoadedScenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
LoadedScenario load_scenario(const std::filesystem::path& path);

/// Checks one matching network against the agent network; throws
/// `ConfigError` naming the offending variable.
void check_matching_contract(const BayesianNetwork& agent_bn, const BayesianNetwork& matching_bn,
                             const std::string& link_variable, const std::string& type_name);

}  // namespace popweave
