#pragma once

#include "popweave/bayes_net.hpp"
#include "popweave/linker.hpp"
#include "popweave/netmetrics.hpp"
#include "popweave/social_graph.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace popweave {

/// GraphML: one string node key per agent attribute, `type` and
/// `provenance` edge keys; directed types carry `directed="true"`.
void write_graphml(std::ostream& out, const BayesianNetwork& bn, const SocialGraph& graph);

/// DOT: undirected graph, edges coloured by type; directed types drawn with
/// an arrowhead.
void write_dot(std::ostream& out, const BayesianNetwork& bn, const SocialGraph& graph);

/// `source,target,type,provenance`, types in declaration order.
void write_edges_csv(std::ostream& out, const SocialGraph& graph);

/// `source,target,provenance` for one type.
void write_type_edges_csv(std::ostream& out, const SocialGraph& graph, std::size_t type);

/// `type,required,created,orphans,fallbacks,error_rate,unsatisfiable`.
void write_matching_report_csv(std::ostream& out, const MatchingReport& report);

/// `metric,value` rows, then per-type mean degrees as `mean_degree.<type>`.
void write_stats_csv(std::ostream& out, const GraphStats& stats);

/// Reads edge CSV files into a graph. Each file needs `source` and `target`
/// columns; a `type` column names the type, otherwise the type is taken from
/// an `edges_<type>.csv` file name (or "link"). Node count is the larger of
/// `node_count` and the highest id plus one. Types are undirected.
/// Throws `ParseError` on malformed rows.
SocialGraph read_edge_files(const std::vector<std::filesystem::path>& files,
                            std::size_t node_count = 0);

/// Row count of a CSV file with a header line.
std::size_t count_csv_rows(const std::filesystem::path& file);

}  // namespace popweave
