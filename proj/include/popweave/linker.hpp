#pragma once

#include "popweave/bayes_net.hpp"
#include "popweave/population.hpp"
#include "popweave/rng.hpp"
#include "popweave/scenario.hpp"
#include "popweave/social_graph.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace popweave {

/// Posterior over side-B attribute vectors given a side-A vector and the
/// link evidence. Only positive-probability vectors are listed.
struct PeerDistribution {
  std::vector<StateVector> support;
  std::vector<double> probabilities;
};

/// A matching network bound to the agent network.
///
/// Variables named `a1.X` / `a2.X` are copies of agent attribute X for the
/// two endpoints; every other variable is a constraint node. Side keys list
/// the endpoint's attribute values in matching-network declaration order.
/// Query results are memoized per distinct key, so a model must not be
/// shared between threads.
class MatchingModel {
 public:
  MatchingModel(const BayesianNetwork& agent_bn, BayesianNetwork matching_bn,
                const std::string& link_variable);

  const BayesianNetwork& network() const { return bn_; }
  /// Agent attribute indices making up the side-A / side-B keys.
  const std::vector<std::size_t>& side_a_attributes() const { return a_attributes_; }
  const std::vector<std::size_t>& side_b_attributes() const { return b_attributes_; }

  StateVector side_a_key(const Agent& agent) const;
  StateVector side_b_key(const Agent& agent) const;

  /// p(link = yes) > 0.
  bool satisfiable() const;
  /// p(a1.* = key, link = yes) > 0.
  bool side_a_consistent(const StateVector& key) const;
  /// p(a2.* = key, link = yes) > 0.
  bool side_b_consistent(const StateVector& key) const;
  /// p(a1.* = a_key, a2.* = b_key, link = yes) > 0.
  bool compatible(const StateVector& a_key, const StateVector& b_key) const;

  /// p(a2.* | a1.* = a_key, link = yes). Throws `ImpossibleEvidence`.
  const PeerDistribution& peer_distribution(const StateVector& a_key) const;
  StateVector sample_peer(const StateVector& a_key, Rng& rng) const;

 private:
  StateVector evidence_for(const StateVector* a_key, const StateVector* b_key) const;

  BayesianNetwork bn_;
  std::size_t link_index_ = 0;
  int yes_state_ = 0;
  std::vector<std::size_t> a_vars_, b_vars_;              // matching-network indices
  std::vector<std::size_t> a_attributes_, b_attributes_;  // agent-network indices
  mutable std::map<StateVector, bool> a_cache_, b_cache_;
  mutable std::map<std::pair<StateVector, StateVector>, bool> pair_cache_;
  mutable std::map<StateVector, PeerDistribution> peer_cache_;
};

struct CandidateSets {
  std::vector<AgentId> side_a;
  std::vector<AgentId> side_b;
};

/// Agents whose side attributes are consistent with link = yes, ascending
/// by id. With `same`, both sides are the intersection of the two sets.
/// Throws `UnsatisfiableLinkType` when p(link = yes) = 0.
CandidateSets derive_candidate_sets(const MatchingModel& model, const Population& pop,
                                    bool same = false);

/// One side-B attribute vector drawn from p(a2.* | a1 attributes, link = yes).
/// Returns agent-attribute labels keyed by attribute name. Throws
/// `ImpossibleEvidence` ("no prototype") when a1 is incompatible.
Evidence sample_peer_prototype(const MatchingModel& model, const BayesianNetwork& agent_bn,
                               const Agent& a1, Rng& rng);

struct TypeMatchingStats {
  std::string type;
  std::size_t required = 0;  // links demanded by side-A capacities
  std::size_t created = 0;
  std::size_t orphans = 0;    // unmet stubs
  std::size_t fallbacks = 0;  // links placed by the fallback pick
  bool unsatisfiable = false;

  /// 1 - created / required; 0 when nothing is required.
  double error_rate() const;
};

struct MatchingReport {
  std::vector<TypeMatchingStats> types;
};

/// Links one matching type into `links`, mutating remaining capacities.
///
/// Side-A candidates are visited in a seeded random order. For each open
/// stub a peer prototype is drawn; an agent with exactly the prototype's
/// side-B attributes and spare capacity is chosen uniformly. Otherwise one
/// is chosen uniformly among every agent in the posterior support with
/// spare capacity (fallback). If none exists the agent's remaining stubs are
/// recorded as orphans.
///
/// Required counts: the sum of side-A capacities over side-A candidates, or
/// half the pooled sum (rounded down) for `same` types, where each link
/// consumes two stubs.
TypeMatchingStats create_links_for_type(const LinkTypeSpec& spec, std::size_t type_index,
                                        const MatchingModel& model, Population& pop,
                                        LinkSet& links, Rng& rng);

/// Builds the graph (one link set per declared type, matching types filled
/// in declaration order). Each type draws from its own stream derived from
/// `seed`, so one type's outcome never shifts another's randomness. An
/// unsatisfiable type is reported with error 1 and skipped.
std::pair<SocialGraph, MatchingReport> run_all_matching(const LoadedScenario& scenario,
                                                        Population pop, std::uint64_t seed);

/// Stream id used for link type `type_index`.
inline std::uint64_t matching_stream(std::size_t type_index) { return 1 + type_index; }

}  // namespace popweave
