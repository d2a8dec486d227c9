#include "popweave/linker.hpp"

#include "popweave/error.hpp"
#include "popweave/inference.hpp"

#include <algorithm>

namespace popweave {

MatchingModel::MatchingModel(const BayesianNetwork& agent_bn, BayesianNetwork matching_bn,
                             const std::string& link_variable)
    : bn_(std::move(matching_bn)) {
  link_index_ = bn_.index_of(link_variable);
  auto yes = bn_.variable(link_index_).state_of("yes");
  if (!yes) throw ConfigError("link variable '" + link_variable + "' has no \"yes\" label");
  yes_state_ = *yes;
  for (std::size_t i = 0; i < bn_.size(); ++i) {
    const std::string& name = bn_.variable(i).name;
    if (name.rfind("a1.", 0) == 0) {
      a_vars_.push_back(i);
      a_attributes_.push_back(agent_bn.index_of(name.substr(3)));
    } else if (name.rfind("a2.", 0) == 0) {
      b_vars_.push_back(i);
      b_attributes_.push_back(agent_bn.index_of(name.substr(3)));
    }
  }
}

StateVector MatchingModel::side_a_key(const Agent& agent) const {
  StateVector key;
  key.reserve(a_attributes_.size());
  for (auto a : a_attributes_) key.push_back(agent.attributes[a]);
  return key;
}

StateVector MatchingModel::side_b_key(const Agent& agent) const {
  StateVector key;
  key.reserve(b_attributes_.size());
  for (auto a : b_attributes_) key.push_back(agent.attributes[a]);
  return key;
}

StateVector MatchingModel::evidence_for(const StateVector* a_key, const StateVector* b_key) const {
  StateVector evidence(bn_.size(), kUnobserved);
  evidence[link_index_] = yes_state_;
  if (a_key) {
    for (std::size_t k = 0; k < a_vars_.size(); ++k) evidence[a_vars_[k]] = (*a_key)[k];
  }
  if (b_key) {
    for (std::size_t k = 0; k < b_vars_.size(); ++k) evidence[b_vars_[k]] = (*b_key)[k];
  }
  return evidence;
}

bool MatchingModel::satisfiable() const {
  return probability_of_evidence(bn_, evidence_for(nullptr, nullptr)) > 0.0;
}

bool MatchingModel::side_a_consistent(const StateVector& key) const {
  auto it = a_cache_.find(key);
  if (it != a_cache_.end()) return it->second;
  const bool ok = probability_of_evidence(bn_, evidence_for(&key, nullptr)) > 0.0;
  a_cache_.emplace(key, ok);
  return ok;
}

bool MatchingModel::side_b_consistent(const StateVector& key) const {
  auto it = b_cache_.find(key);
  if (it != b_cache_.end()) return it->second;
  const bool ok = probability_of_evidence(bn_, evidence_for(nullptr, &key)) > 0.0;
  b_cache_.emplace(key, ok);
  return ok;
}

bool MatchingModel::compatible(const StateVector& a_key, const StateVector& b_key) const {
  auto pair = std::make_pair(a_key, b_key);
  auto it = pair_cache_.find(pair);
  if (it != pair_cache_.end()) return it->second;
  const bool ok = probability_of_evidence(bn_, evidence_for(&a_key, &b_key)) > 0.0;
  pair_cache_.emplace(std::move(pair), ok);
  return ok;
}

const PeerDistribution& MatchingModel::peer_distribution(const StateVector& a_key) const {
  auto it = peer_cache_.find(a_key);
  if (it != peer_cache_.end()) return it->second;

  const Factor posterior = posterior_joint(bn_, evidence_for(&a_key, nullptr), b_vars_);
  // The factor scope is ascending by matching index, the same order as b_vars_.
  PeerDistribution dist;
  for (std::size_t pos = 0; pos < posterior.size(); ++pos) {
    const double p = posterior.values[static_cast<Eigen::Index>(pos)];
    if (p <= 0.0) continue;
    dist.support.push_back(posterior.states_at(pos));
    dist.probabilities.push_back(p);
  }
  return peer_cache_.emplace(a_key, std::move(dist)).first->second;
}

StateVector MatchingModel::sample_peer(const StateVector& a_key, Rng& rng) const {
  const auto& dist = peer_distribution(a_key);
  return dist.support[static_cast<std::size_t>(sample_categorical(dist.probabilities, rng))];
}

CandidateSets derive_candidate_sets(const MatchingModel& model, const Population& pop, bool same) {
  if (!model.satisfiable()) {
    throw UnsatisfiableLinkType("unsatisfiable link type: p(link = yes) = 0");
  }
  CandidateSets sets;
  for (const auto& agent : pop.agents) {
    const bool a_ok = model.side_a_consistent(model.side_a_key(agent));
    const bool b_ok = model.side_b_consistent(model.side_b_key(agent));
    if (same) {
      if (a_ok && b_ok) {
        sets.side_a.push_back(agent.id);
        sets.side_b.push_back(agent.id);
      }
      continue;
    }
    if (a_ok) sets.side_a.push_back(agent.id);
    if (b_ok) sets.side_b.push_back(agent.id);
  }
  return sets;
}

Evidence sample_peer_prototype(const MatchingModel& model, const BayesianNetwork& agent_bn,
                               const Agent& a1, Rng& rng) {
  StateVector peer;
  try {
    peer = model.sample_peer(model.side_a_key(a1), rng);
  } catch (const ImpossibleEvidence&) {
    throw ImpossibleEvidence("no prototype: agent " + std::to_string(a1.id) +
                             " is incompatible with the link evidence");
  }
  Evidence labels;
  const auto& attributes = model.side_b_attributes();
  for (std::size_t k = 0; k < attributes.size(); ++k) {
    const Variable& v = agent_bn.variable(attributes[k]);
    labels[v.name] = v.domain[static_cast<std::size_t>(peer[k])];
  }
  return labels;
}

double TypeMatchingStats::error_rate() const {
  if (required == 0) return 0.0;
  return 1.0 - static_cast<double>(created) / static_cast<double>(required);
}

namespace {

// Side-B agents with spare capacity, bucketed by side-B key. Removal is
// O(1) via a position table.
class AvailabilityIndex {
 public:
  AvailabilityIndex(const MatchingModel& model, const Population& pop,
                    const std::vector<AgentId>& side_b, std::size_t type, bool same)
      : type_(type), same_(same), position_(pop.size(), kAbsent), bucket_of_(pop.size(), kAbsent) {
    for (auto id : side_b) {
      if (capacity(pop[id]) <= 0) continue;
      auto [it, inserted] = keys_.try_emplace(model.side_b_key(pop[id]), buckets_.size());
      if (inserted) buckets_.emplace_back();
      auto& bucket = buckets_[it->second];
      bucket_of_[id] = it->second;
      position_[id] = bucket.size();
      bucket.push_back(id);
    }
  }

  int capacity(const Agent& agent) const {
    const Capacity& c = agent.remaining_capacity[type_];
    return same_ ? c.side_a : c.side_b;
  }

  const std::vector<AgentId>* bucket(const StateVector& key) const {
    auto it = keys_.find(key);
    return it == keys_.end() ? nullptr : &buckets_[it->second];
  }

  void remove(AgentId id) {
    if (position_[id] == kAbsent) return;
    auto& bucket = buckets_[bucket_of_[id]];
    const AgentId moved = bucket.back();
    bucket[position_[id]] = moved;
    position_[moved] = position_[id];
    bucket.pop_back();
    position_[id] = kAbsent;
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::size_t type_;
  bool same_;
  std::map<StateVector, std::size_t> keys_;
  std::vector<std::vector<AgentId>> buckets_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> bucket_of_;
};

}  // namespace

TypeMatchingStats create_links_for_type(const LinkTypeSpec& spec, std::size_t type_index,
                                        const MatchingModel& model, Population& pop,
                                        LinkSet& links, Rng& rng) {
  TypeMatchingStats stats;
  stats.type = spec.name;
  const CandidateSets sets = derive_candidate_sets(model, pop, spec.same);

  std::size_t demand = 0;
  for (auto id : sets.side_a) demand += static_cast<std::size_t>(pop[id].capacity[type_index].side_a);
  stats.required = spec.same ? demand / 2 : demand;

  AvailabilityIndex available(model, pop, sets.side_b, type_index, spec.same);
  auto side_a_remaining = [&](AgentId id) -> int& {
    return pop[id].remaining_capacity[type_index].side_a;
  };
  auto side_b_remaining = [&](AgentId id) -> int& {
    auto& c = pop[id].remaining_capacity[type_index];
    return spec.same ? c.side_a : c.side_b;
  };

  std::vector<AgentId> order = sets.side_a;
  shuffle(std::span<AgentId>(order), rng);

  std::vector<AgentId> eligible;
  auto collect = [&](const std::vector<AgentId>* bucket, AgentId a1) {
    if (!bucket) return;
    for (auto id : *bucket) {
      if (id != a1 && !links.contains(a1, id)) eligible.push_back(id);
    }
  };

  for (const AgentId a1 : order) {
    if (side_a_remaining(a1) <= 0) continue;
    const StateVector a_key = model.side_a_key(pop[a1]);
    while (side_a_remaining(a1) > 0) {
      Provenance provenance = Provenance::sampled;
      eligible.clear();
      collect(available.bucket(model.sample_peer(a_key, rng)), a1);
      if (eligible.empty()) {
        provenance = Provenance::fallback;
        for (const auto& key : model.peer_distribution(a_key).support) {
          collect(available.bucket(key), a1);
        }
      }
      if (eligible.empty()) break;
      // Buckets reorder on removal; sort so the pick depends only on the set.
      std::sort(eligible.begin(), eligible.end());
      const AgentId b = eligible[uniform_index(rng, eligible.size())];

      links.insert({type_index, a1, b, provenance});
      ++stats.created;
      if (provenance == Provenance::fallback) ++stats.fallbacks;
      if (--side_a_remaining(a1) <= 0 && spec.same) available.remove(a1);
      if (--side_b_remaining(b) <= 0) available.remove(b);
    }
  }
  // Stubs still open at the end are orphans; for pooled types a stub left by
  // one visit may still be filled by a later one.
  for (auto id : sets.side_a) stats.orphans += static_cast<std::size_t>(side_a_remaining(id));
  return stats;
}

std::pair<SocialGraph, MatchingReport> run_all_matching(const LoadedScenario& scenario,
                                                        Population pop, std::uint64_t seed) {
  SocialGraph graph;
  MatchingReport report;
  for (const auto& spec : scenario.config.link_types) graph.add_type(spec.name, spec.directed);

  for (std::size_t t = 0; t < scenario.config.link_types.size(); ++t) {
    const auto& spec = scenario.config.link_types[t];
    if (spec.kind != LinkKind::matching) continue;
    MatchingModel model(scenario.agent_bn, *scenario.matching_bns[t], spec.link_variable);
    Rng rng = make_stream(seed, matching_stream(t));
    try {
      report.types.push_back(create_links_for_type(spec, t, model, pop, graph.links[t], rng));
    } catch (const UnsatisfiableLinkType&) {
      TypeMatchingStats stats;
      stats.type = spec.name;
      stats.unsatisfiable = true;
      std::size_t demand = 0;
      for (const auto& agent : pop.agents) {
        demand += static_cast<std::size_t>(agent.capacity[t].side_a);
      }
      stats.required = spec.same ? demand / 2 : demand;
      stats.orphans = demand;
      report.types.push_back(stats);
    }
  }
  graph.population = std::move(pop);
  return {std::move(graph), std::move(report)};
}

}  // namespace popweave
