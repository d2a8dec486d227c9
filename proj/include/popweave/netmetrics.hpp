#pragma once

#include "popweave/bayes_net.hpp"
#include "popweave/linker.hpp"
#include "popweave/population.hpp"
#include "popweave/rng.hpp"
#include "popweave/social_graph.hpp"

#include <map>
#include <string>
#include <vector>

namespace popweave {

/// Mean over variables of the count-weighted mean absolute gap between the
/// empirical conditional rows and the CPT rows (observed rows only).
double distribution_error(const BayesianNetwork& bn, const Population& pop);

/// Per type: 1 - created / required (0 when nothing is required).
std::vector<double> matching_error(const MatchingReport& report);

/// Simple undirected projection: union of all types, directions dropped.
/// Neighbour lists are sorted and duplicate-free.
std::vector<std::vector<AgentId>> undirected_projection(const SocialGraph& graph);

struct DegreeSummary {
  std::string type;            // "all" for the projection
  std::vector<std::size_t> histogram;  // histogram[d] = agents with degree d
  double mean = 0.0;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;  // projection edges
  double density = 0.0;
  double transitivity = 0.0;
  std::size_t triangles = 0;
  std::size_t connected_triples = 0;
  double avg_path_length = 0.0;
  std::size_t path_sources = 0;
  std::vector<std::size_t> component_sizes;  // descending
  DegreeSummary overall;
  std::vector<DegreeSummary> per_type;  // incident degree, both directions
};

/// Density and exact global transitivity (3 x triangles / connected triples)
/// on the undirected projection; average shortest-path length by BFS from
/// `path_sample_k` distinct sources drawn uniformly from the largest
/// component (every member when k covers it). Throws `Error` when n < 2.
GraphStats graph_stats(const SocialGraph& graph, std::size_t path_sample_k, Rng& rng);

struct WeightedEdge {
  AgentId a = 0;
  AgentId b = 0;
  double weight = 0.0;
};

/// Pairs linked by any type, weighted 1 - prod_t (1 - p_t) over their types.
/// Types missing from `weights` count as 0; zero-weight pairs are dropped.
/// Throws `ConfigError` on a weight outside [0, 1].
std::vector<WeightedEdge> derive_interaction_network(const SocialGraph& graph,
                                                     const std::map<std::string, double>& weights);

}  // namespace popweave
