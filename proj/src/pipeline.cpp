#include "popweave/pipeline.hpp"

#include "popweave/population.hpp"
#include "popweave/transitive.hpp"

#include <atomic>
#include <chrono>
#include <thread>

namespace popweave {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const LoadedScenario& scenario, std::size_t n, std::uint64_t seed) {
  PipelineResult result;
  auto start = std::chrono::steady_clock::now();
  const auto capacities = scenario.capacities();
  Population pop = generate_population(scenario.agent_bn, n, seed, capacities);
  result.timings.population_seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  auto [graph, report] = run_all_matching(scenario, std::move(pop), seed);
  result.timings.matching_seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  apply_all_rules(scenario.config.transitive_rules, graph, seed);
  result.timings.transitive_seconds = seconds_since(start);

  result.graph = std::move(graph);
  result.report = std::move(report);
  return result;
}

std::vector<SweepRow> sweep(const LoadedScenario& scenario, const std::vector<std::size_t>& sizes,
                            std::size_t seeds_per_size, const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (auto n : sizes) {
    for (std::size_t s = 0; s < seeds_per_size; ++s) {
      SweepRow row;
      row.n = n;
      row.seed = scenario.config.seed + s;
      rows.push_back(std::move(row));
    }
  }

  auto run_row = [&](SweepRow& row) {
    try {
      PipelineResult result = run_pipeline(scenario, row.n, row.seed);
      row.distribution_error = distribution_error(scenario.agent_bn, result.graph.population);
      row.matching_error = matching_error(result.report);
      Rng rng = make_stream(row.seed, kStatsStream);
      row.stats = graph_stats(result.graph, options.path_sample_k, rng);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, rows.size()));
  if (workers == 1) {
    for (auto& row : rows) run_row(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) run_row(rows[i]);
      });
    }
    for (auto& t : threads) t.join();
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const LoadedScenario& scenario,
                     const std::vector<SweepRow>& rows) {
  std::vector<std::string> matched;
  for (const auto& t : scenario.config.link_types) {
    if (t.kind == LinkKind::matching) matched.push_back(t.name);
  }
  out << "n,seed,distribution_error";
  for (const auto& name : matched) out << ",matching_error." << name;
  out << ",density,transitivity,avg_path_length,path_sources,mean_degree,largest_component,error\n";
  out.precision(10);
  for (const auto& row : rows) {
    out << row.n << ',' << row.seed << ',';
    if (row.failed()) {
      out << ',';
      for (std::size_t i = 0; i < matched.size(); ++i) out << ',';
      out << ",,,,,," << '"';
      for (char c : row.error) out << (c == '"' ? '\'' : c == '\n' ? ' ' : c);
      out << "\"\n";
      continue;
    }
    out << row.distribution_error;
    for (double e : row.matching_error) out << ',' << e;
    out << ',' << row.stats.density << ',' << row.stats.transitivity << ','
        << row.stats.avg_path_length << ',' << row.stats.path_sources << ','
        << row.stats.overall.mean << ','
        << (row.stats.component_sizes.empty() ? 0 : row.stats.component_sizes[0]) << ",\n";
  }
}

}  // namespace popweave
