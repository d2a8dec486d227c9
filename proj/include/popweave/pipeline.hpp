#pragma once

#include "popweave/linker.hpp"
#include "popweave/netmetrics.hpp"
#include "popweave/rng.hpp"
#include "popweave/scenario.hpp"
#include "popweave/social_graph.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace popweave {

struct StageTimings {
  double population_seconds = 0.0;
  double matching_seconds = 0.0;
  double transitive_seconds = 0.0;
};

struct PipelineResult {
  SocialGraph graph;
  MatchingReport report;
  StageTimings timings;
};

/// Population, matching in declaration order, then transitive rules.
/// Fully determined by (scenario, n, seed).
PipelineResult run_pipeline(const LoadedScenario& scenario, std::size_t n, std::uint64_t seed);

inline constexpr std::uint64_t kStatsStream = 200000;

struct SweepOptions {
  std::size_t path_sample_k = 100;
  std::size_t threads = 1;
};

struct SweepRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double distribution_error = 0.0;
  std::vector<double> matching_error;  // matching types, declaration order
  GraphStats stats;
  std::string error;  // non-empty when the row failed

  bool failed() const { return !error.empty(); }
};

/// One pipeline run per (size, seed) with seeds scenario.seed + 0..k-1.
/// Rows come back ordered by size then seed regardless of thread count.
std::vector<SweepRow> sweep(const LoadedScenario& scenario, const std::vector<std::size_t>& sizes,
                            std::size_t seeds_per_size, const SweepOptions& options = {});

/// Header: n,seed,distribution_error,matching_error.<type>... (matching types
/// in declaration order),density,transitivity,avg_path_length,path_sources,
/// mean_degree,largest_component,error
void write_sweep_csv(std::ostream& out, const LoadedScenario& scenario,
                     const std::vector<SweepRow>& rows);

}  // namespace popweave
