#include "popweave/social_graph.hpp"

#include <utility>

namespace popweave {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::sampled:
      return "sampled";
    case Provenance::fallback:
      return "fallback";
    case Provenance::transitive:
      return "transitive";
  }
  return "?";
}

std::uint64_t LinkSet::key(AgentId a, AgentId b) const {
  if (!directed_ && b < a) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool LinkSet::contains(AgentId a, AgentId b) const { return keys_.count(key(a, b)) != 0; }

bool LinkSet::insert(TypedLink link) {
  if (link.a == link.b) return false;
  if (!directed_ && link.b < link.a) std::swap(link.a, link.b);
  if (!keys_.insert(key(link.a, link.b)).second) return false;
  links_.push_back(link);
  return true;
}

std::size_t SocialGraph::add_type(std::string name, bool directed) {
  types.push_back({std::move(name), directed});
  links.emplace_back(directed);
  return types.size() - 1;
}

std::optional<std::size_t> SocialGraph::find_type(std::string_view name) const {
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SocialGraph::total_links() const {
  std::size_t total = 0;
  for (const auto& set : links) total += set.size();
  return total;
}

}  // namespace popweave
