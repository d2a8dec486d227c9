#include "popweave/transitive.hpp"

#include "popweave/error.hpp"

#include <algorithm>
#include <unordered_set>

namespace popweave {

namespace {

using Adjacency = std::vector<std::vector<AgentId>>;

Adjacency hop_adjacency(const SocialGraph& graph, const Hop& hop) {
  auto type = graph.find_type(hop.type);
  if (!type) throw ConfigError("transitive rule references unknown link type '" + hop.type + "'");
  const LinkSet& set = graph.links[*type];
  const Orientation orientation = set.directed() ? hop.orientation : Orientation::either;
  Adjacency adj(graph.node_count());
  for (const auto& link : set.links()) {
    if (orientation != Orientation::backward) adj[link.a].push_back(link.b);
    if (orientation != Orientation::forward) adj[link.b].push_back(link.a);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

std::vector<PathMatch> enumerate_paths(const TransitiveRule& rule, const SocialGraph& graph) {
  const Adjacency first = hop_adjacency(graph, rule.hop1);
  const Adjacency second = hop_adjacency(graph, rule.hop2);
  std::vector<PathMatch> paths;
  for (AgentId x = 0; x < graph.node_count(); ++x) {
    for (AgentId y : first[x]) {
      for (AgentId z : second[y]) {
        if (z != x) paths.push_back({x, y, z});
      }
    }
  }
  return paths;
}

std::vector<TypedLink> apply_transitive_rule(const TransitiveRule& rule, SocialGraph& graph,
                                             Rng& rng) {
  auto target = graph.find_type(rule.create);
  if (!target) throw ConfigError("transitive rule creates unknown link type '" + rule.create + "'");
  LinkSet& out = graph.links[*target];
  const bool directed = out.directed();

  std::vector<TypedLink> created;
  std::unordered_set<std::uint64_t> tried;
  for (const auto& path : enumerate_paths(rule, graph)) {
    AgentId source = rule.create_directed_from == Endpoint::x ? path.x : path.z;
    AgentId dest = source == path.x ? path.z : path.x;
    if (!directed && dest < source) std::swap(source, dest);
    const std::uint64_t key = (static_cast<std::uint64_t>(source) << 32) | dest;
    if (!tried.insert(key).second) continue;
    if (out.contains(source, dest)) continue;
    if (uniform_unit(rng) < rule.probability) {
      TypedLink link{*target, source, dest, Provenance::transitive};
      if (out.insert(link)) created.push_back(link);
    }
  }
  return created;
}

std::size_t apply_all_rules(std::span<const TransitiveRule> rules, SocialGraph& graph,
                            std::uint64_t seed) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    Rng rng = make_stream(seed, transitive_stream(i));
    total += apply_transitive_rule(rules[i], graph, rng).size();
  }
  return total;
}

}  // namespace popweave
