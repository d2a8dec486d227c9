#pragma once

#include "popweave/population.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace popweave {

enum class Provenance { sampled, fallback, transitive };

std::string_view to_string(Provenance p);

struct TypedLink {
  std::size_t type = 0;
  AgentId a = 0;
  AgentId b = 0;
  Provenance provenance = Provenance::sampled;
};

struct LinkTypeInfo {
  std::string name;
  bool directed = false;
};

/// Links of one type. Undirected pairs are stored with the smaller id first;
/// self-links and duplicate pairs are rejected.
class LinkSet {
 public:
  explicit LinkSet(bool directed = false) : directed_(directed) {}

  bool directed() const { return directed_; }
  bool contains(AgentId a, AgentId b) const;
  /// Returns false (and stores nothing) for a self-link or a duplicate.
  bool insert(TypedLink link);
  const std::vector<TypedLink>& links() const { return links_; }
  std::size_t size() const { return links_.size(); }

 private:
  std::uint64_t key(AgentId a, AgentId b) const;

  bool directed_;
  std::vector<TypedLink> links_;
  std::unordered_set<std::uint64_t> keys_;
};

/// The typed multigraph: agents with attributes plus one link set per type.
struct SocialGraph {
  Population population;
  std::vector<LinkTypeInfo> types;
  std::vector<LinkSet> links;

  std::size_t node_count() const { return population.size(); }
  std::size_t add_type(std::string name, bool directed);
  std::optional<std::size_t> find_type(std::string_view name) const;
  std::size_t total_links() const;
};

}  // namespace popweave
