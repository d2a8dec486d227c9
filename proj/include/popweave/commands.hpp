#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace popweave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarnings = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRuntimeError = 3;

inline constexpr const char* kToolVersion = "0.1.0";

struct ValidateOptions {
  std::filesystem::path scenario;
  bool strict = false;
};

/// Parses every file and checks every contract, listing all problems.
/// Warns on link types that can never be realized.
int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

struct GenerateOptions {
  std::filesystem::path scenario;
  std::optional<std::size_t> size;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir;
  std::string format = "graphml";  // graphml | csv | dot
};

/// Writes population.csv, edges_<type>.csv, the merged graph
/// (graph.graphml, graph.dot, or nodes.csv + edges.csv),
/// matching_report.csv and manifest.json. On failure the files written so
/// far are removed.
int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);

struct StatsOptions {
  /// Edge CSV files, or directories produced by `generate`.
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> nodes;
  std::optional<std::filesystem::path> out;
  std::size_t path_samples = 200;
  std::uint64_t seed = 0;
};

int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::filesystem::path scenario;
  std::vector<std::size_t> sizes;
  std::size_t seeds = 1;
  std::optional<std::filesystem::path> out;
  std::size_t path_samples = 100;
};

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);

}  // namespace popweave::cli
