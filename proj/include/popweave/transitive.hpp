#pragma once

#include "popweave/rng.hpp"
#include "popweave/scenario.hpp"
#include "popweave/social_graph.hpp"

#include <span>
#include <vector>

namespace popweave {

/// x -hop1- y -hop2- z with x != z.
struct PathMatch {
  AgentId x = 0;
  AgentId y = 0;
  AgentId z = 0;
};

/// Every path for `rule` in the current graph, ordered by (x, y, z).
/// Undirected hop types are traversed both ways whatever the orientation.
std::vector<PathMatch> enumerate_paths(const TransitiveRule& rule, const SocialGraph& graph);

/// One Bernoulli(rule.probability) trial per distinct candidate pair (first
/// enumeration wins; unordered pairs for undirected targets). Pairs already
/// linked in the target type are skipped without a trial. Returns the links
/// created, which are also inserted into `graph`.
std::vector<TypedLink> apply_transitive_rule(const TransitiveRule& rule, SocialGraph& graph,
                                             Rng& rng);

/// Applies `rules` in order, rule i drawing from stream `transitive_stream(i)`
/// of `seed`. Returns the number of links created.
std::size_t apply_all_rules(std::span<const TransitiveRule> rules, SocialGraph& graph,
                            std::uint64_t seed);

inline std::uint64_t transitive_stream(std::size_t rule_index) { return 100000 + rule_index; }

}  // namespace popweave
