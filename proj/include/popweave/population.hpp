#pragma once

#include "popweave/bayes_net.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace popweave {

using AgentId = std::uint32_t;

/// A resolved capacity rule: read an agent attribute, or use a constant.
struct CapacityRule {
  std::optional<std::size_t> attribute;
  int constant = 0;
};

/// Capacity rules of one link type. Side A is the first endpoint (the
/// source of a directed type); side B the second.
struct LinkCapacity {
  CapacityRule side_a;
  CapacityRule side_b;
};

struct Capacity {
  int side_a = 0;
  int side_b = 0;
};

struct Agent {
  AgentId id = 0;
  Assignment attributes;
  /// Per link type, as read from the capacity attributes at generation.
  std::vector<Capacity> capacity;
  /// Per link type, decremented by the linker; never negative.
  std::vector<Capacity> remaining_capacity;
};

struct Population {
  std::vector<Agent> agents;

  std::size_t size() const { return agents.size(); }
  const Agent& operator[](std::size_t i) const { return agents[i]; }
  Agent& operator[](std::size_t i) { return agents[i]; }
};

/// `n` independent ancestral samples of `bn`. Agents are drawn in chunks of
/// `kGenerationChunk`, each chunk from its own stream derived from `seed`,
/// so the result does not depend on the worker count. Capacities are read
/// from the attributes named by `capacities`; a label that is not a
/// non-negative integer throws `Error` naming the agent and attribute.
Population generate_population(const BayesianNetwork& bn, std::size_t n, std::uint64_t seed,
                               std::span<const LinkCapacity> capacities = {});

inline constexpr std::size_t kGenerationChunk = 4096;

/// Stream id of generation chunk `chunk`.
inline std::uint64_t population_stream(std::size_t chunk) { return (1ULL << 32) + chunk; }

/// Parses a capacity label ("0", "3", ...); nullopt unless it is a
/// non-negative integer.
std::optional<int> parse_capacity_label(std::string_view label);

/// Initial capacities of one agent.
std::vector<Capacity> read_capacities(const BayesianNetwork& bn, const Assignment& attributes,
                                      std::span<const LinkCapacity> capacities, AgentId id);

/// Observed conditional frequencies of one variable, shaped like its CPT.
struct EmpiricalTable {
  Eigen::MatrixXd frequencies;  // rows with zero count are left at zero
  Eigen::VectorXd counts;       // observations per parent configuration

  bool observed(Eigen::Index row) const { return counts[row] > 0.0; }
};

/// One table per variable. Parent configurations never observed are flagged
/// through a zero count rather than filled.
std::vector<EmpiricalTable> empirical_conditionals(const BayesianNetwork& bn,
                                                   const Population& pop);

/// Copy of `bn` with every observed CPT row replaced by its empirical row.
BayesianNetwork learn_network(const BayesianNetwork& bn, std::span<const EmpiricalTable> tables);

/// Groups agents by their values on a fixed attribute subset.
class AttributeIndex {
 public:
  AttributeIndex(const Population& pop, std::vector<std::size_t> attributes);

  const std::vector<std::size_t>& attributes() const { return attributes_; }
  StateVector key_of(const Agent& agent) const;
  /// Agent ids with the given key, ascending; empty if none.
  const std::vector<AgentId>& lookup(const StateVector& key) const;
  const std::map<StateVector, std::vector<AgentId>>& buckets() const { return buckets_; }

 private:
  std::vector<std::size_t> attributes_;
  std::map<StateVector, std::vector<AgentId>> buckets_;
};

/// `id,<attribute names...>` header, one row per agent, labels verbatim.
void write_population_csv(std::ostream& out, const BayesianNetwork& bn, const Population& pop);

}  // namespace popweave
