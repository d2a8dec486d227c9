#include "popweave/commands.hpp"

#include "popweave/bn_io.hpp"
#include "popweave/error.hpp"
#include "popweave/graph_io.hpp"
#include "popweave/inference.hpp"
#include "popweave/linker.hpp"
#include "popweave/pipeline.hpp"
#include "popweave/scenario.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace popweave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const fs::path& file) {
  const std::string bytes = read_text_file(file);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

namespace {

// Could any agent the agent network can produce sit on the given side?
bool side_possible(const MatchingModel& model, const BayesianNetwork& agent_bn, bool side_a) {
  const auto& attributes = side_a ? model.side_a_attributes() : model.side_b_attributes();
  const Factor marginal =
      posterior_joint(agent_bn, StateVector(agent_bn.size(), kUnobserved), attributes);
  StateVector states(agent_bn.size(), 0);
  for (std::size_t pos = 0; pos < marginal.size(); ++pos) {
    if (marginal.values[static_cast<Eigen::Index>(pos)] <= 0.0) continue;
    const auto local = marginal.states_at(pos);
    for (std::size_t k = 0; k < marginal.scope.size(); ++k) states[marginal.scope[k]] = local[k];
    StateVector key;
    for (auto a : attributes) key.push_back(states[a]);
    if (side_a ? model.side_a_consistent(key) : model.side_b_consistent(key)) return true;
  }
  return false;
}

std::optional<BayesianNetwork> check_bn_file(const fs::path& path,
                                             std::vector<std::string>& problems) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    problems.push_back(std::string("missing file: ") + path.string());
    return std::nullopt;
  }
  try {
    BayesianNetwork bn = parse_bn_unchecked(text);
    const auto report = validate_network(bn);
    for (const auto& p : report.problems) {
      problems.push_back(path.string() + ": variable '" + p.variable + "': " + p.message);
    }
    if (!report.ok()) return std::nullopt;
    return bn;
  } catch (const ParseError& e) {
    problems.push_back(path.string() + ": " + e.what());
    return std::nullopt;
  }
}

// Files written by one generate run; removed unless committed.
class OutputFiles {
 public:
  explicit OutputFiles(fs::path dir) : dir_(std::move(dir)) {}
  ~OutputFiles() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : written_) fs::remove(f, ec);
  }

  template <typename Write>
  void write(const std::string& name, Write write_body) {
    const fs::path path = dir_ / name;
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_body(out);
    out.flush();
    if (!out) throw Error("failed writing '" + path.string() + "'");
    names_.push_back(name);
  }

  const std::vector<std::string>& names() const { return names_; }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

}  // namespace

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  std::vector<std::string> warnings;

  ScenarioConfig config;
  try {
    config = parse_scenario_config(read_text_file(options.scenario));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ParseError& e) {
    err << "error: " << options.scenario.string() << ": " << e.what() << '\n';
    return kExitInputError;
  }
  const fs::path base = options.scenario.parent_path();

  auto agent_bn = check_bn_file(base / config.agent_bn, problems);
  std::vector<std::optional<BayesianNetwork>> matching(config.link_types.size());
  for (std::size_t t = 0; t < config.link_types.size(); ++t) {
    const auto& spec = config.link_types[t];
    if (spec.kind != LinkKind::matching) continue;
    matching[t] = check_bn_file(base / spec.bn, problems);
  }

  if (agent_bn) {
    // Contract checks go through the same loader the pipeline uses.
    for (std::size_t t = 0; t < config.link_types.size(); ++t) {
      const auto& spec = config.link_types[t];
      if (!matching[t]) continue;
      try {
        check_matching_contract(*agent_bn, *matching[t], spec.link_variable, spec.name);
      } catch (const ConfigError& e) {
        problems.push_back(e.what());
        matching[t].reset();
        continue;
      }
      for (const CapacitySource* source : {&spec.rc_a, &spec.rc_b}) {
        if (source->is_constant()) continue;
        auto index = agent_bn->find(source->attribute);
        bool ok = index.has_value();
        if (ok) {
          for (const auto& label : agent_bn->variable(*index).domain) {
            ok = ok && parse_capacity_label(label).has_value();
          }
        }
        if (!ok) {
          problems.push_back("link type '" + spec.name + "': capacity attribute '" +
                             source->attribute + "' missing or not integer-valued");
        }
      }
    }
  }

  if (problems.empty() && agent_bn) {
    for (std::size_t t = 0; t < config.link_types.size(); ++t) {
      const auto& spec = config.link_types[t];
      if (!matching[t]) continue;
      MatchingModel model(*agent_bn, *matching[t], spec.link_variable);
      if (!model.satisfiable()) {
        warnings.push_back("unsatisfiable link type '" + spec.name + "': link variable '" +
                           spec.link_variable + "' is never \"yes\"");
        continue;
      }
      if (!side_possible(model, *agent_bn, true)) {
        warnings.push_back("link type '" + spec.name + "': side-A candidate set is provably empty");
      }
      if (!side_possible(model, *agent_bn, false)) {
        warnings.push_back("link type '" + spec.name + "': side-B candidate set is provably empty");
      }
    }
  }

  for (const auto& p : problems) err << "error: " << p << '\n';
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  if (!problems.empty()) {
    out << options.scenario.string() << ": " << problems.size() << " problem(s)\n";
    return kExitInputError;
  }
  out << options.scenario.string() << ": ok (" << config.link_types.size() << " link types, "
      << config.transitive_rules.size() << " transitive rules, " << warnings.size()
      << " warning(s))\n";
  if (options.strict && !warnings.empty()) return kExitWarnings;
  return kExitOk;
}

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
  if (options.format != "graphml" && options.format != "csv" && options.format != "dot") {
    err << "error: unknown format '" << options.format << "'\n";
    return kExitInputError;
  }
  LoadedScenario scenario;
  try {
    scenario = load_scenario(options.scenario);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  const std::size_t size = options.size.value_or(scenario.config.population_size);
  const std::uint64_t seed = options.seed.value_or(scenario.config.seed);
  if (size == 0) {
    err << "error: size must be at least 1\n";
    return kExitInputError;
  }
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec || !fs::is_directory(options.out_dir)) {
    err << "error: cannot create output directory '" << options.out_dir.string() << "'\n";
    return kExitInputError;
  }

  OutputFiles files(options.out_dir);
  try {
    PipelineResult result = run_pipeline(scenario, size, seed);
    const auto& bn = scenario.agent_bn;
    const auto& graph = result.graph;

    files.write("population.csv", [&](std::ostream& o) { write_population_csv(o, bn, graph.population); });
    for (std::size_t t = 0; t < graph.types.size(); ++t) {
      files.write("edges_" + graph.types[t].name + ".csv",
                  [&](std::ostream& o) { write_type_edges_csv(o, graph, t); });
    }
    if (options.format == "graphml") {
      files.write("graph.graphml", [&](std::ostream& o) { write_graphml(o, bn, graph); });
    } else if (options.format == "dot") {
      files.write("graph.dot", [&](std::ostream& o) { write_dot(o, bn, graph); });
    } else {
      files.write("nodes.csv", [&](std::ostream& o) { write_population_csv(o, bn, graph.population); });
      files.write("edges.csv", [&](std::ostream& o) { write_edges_csv(o, graph); });
    }
    files.write("matching_report.csv",
                [&](std::ostream& o) { write_matching_report_csv(o, result.report); });

    json manifest;
    manifest["tool"] = "popweave";
    manifest["version"] = kToolVersion;
    manifest["scenario"] = options.scenario.string();
    manifest["seed"] = seed;
    manifest["size"] = size;
    manifest["format"] = options.format;
    manifest["timings_seconds"] = {{"population", result.timings.population_seconds},
                                   {"matching", result.timings.matching_seconds},
                                   {"transitive", result.timings.transitive_seconds}};
    json digests = json::object();
    for (const auto& name : files.names()) digests[name] = sha256_file(options.out_dir / name);
    manifest["files"] = digests;
    files.write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    files.commit();

    out << "generated " << size << " agents, " << graph.total_links() << " links (seed " << seed
        << ") into " << options.out_dir.string() << '\n';
    for (const auto& t : result.report.types) {
      out << "  " << t.type << ": required " << t.required << ", created " << t.created
          << ", orphans " << t.orphans << ", fallbacks " << t.fallbacks << ", error "
          << t.error_rate() << (t.unsatisfiable ? " (unsatisfiable)" : "") << '\n';
    }
    for (std::size_t t = 0; t < graph.types.size(); ++t) {
      if (scenario.config.link_types[t].kind == LinkKind::transitive) {
        out << "  " << graph.types[t].name << ": " << graph.links[t].size() << " transitive links\n";
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> edge_files;
  std::optional<fs::path> nodes = options.nodes;
  for (const auto& input : options.inputs) {
    if (fs::is_directory(input)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(input)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("edges_", 0) == 0 && entry.path().extension() == ".csv") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      edge_files.insert(edge_files.end(), found.begin(), found.end());
      if (!nodes && fs::exists(input / "population.csv")) nodes = input / "population.csv";
    } else {
      edge_files.push_back(input);
    }
  }
  if (edge_files.empty()) {
    err << "error: no edge files given\n";
    return kExitInputError;
  }
  try {
    const std::size_t n = nodes ? count_csv_rows(*nodes) : 0;
    SocialGraph graph = read_edge_files(edge_files, n);
    Rng rng = make_stream(options.seed, kStatsStream);
    const GraphStats stats = graph_stats(graph, options.path_samples, rng);
    if (options.out) {
      std::ofstream file(*options.out);
      if (!file) throw ConfigError("cannot write '" + options.out->string() + "'");
      write_stats_csv(file, stats);
    }
    out << "nodes " << stats.nodes << ", edges " << stats.edges << '\n'
        << "density " << stats.density << '\n'
        << "transitivity " << stats.transitivity << '\n'
        << "avg_path_length " << stats.avg_path_length << " (" << stats.path_sources
        << " sources)\n"
        << "components " << stats.component_sizes.size() << ", largest "
        << (stats.component_sizes.empty() ? 0 : stats.component_sizes[0]) << '\n'
        << "mean_degree " << stats.overall.mean << '\n';
    for (const auto& t : stats.per_type) out << "mean_degree." << t.type << ' ' << t.mean << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  if (options.sizes.empty() || options.seeds == 0 ||
      std::find(options.sizes.begin(), options.sizes.end(), 0) != options.sizes.end()) {
    err << "error: sizes must be positive and seeds at least 1\n";
    return kExitInputError;
  }
  LoadedScenario scenario;
  try {
    scenario = load_scenario(options.scenario);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  popweave::SweepOptions sweep_options;
  sweep_options.path_sample_k = options.path_samples;
  sweep_options.threads = worker_count();
  const auto rows = sweep(scenario, options.sizes, options.seeds, sweep_options);
  if (options.out) {
    std::ofstream file(*options.out);
    if (!file) {
      err << "error: cannot write '" << options.out->string() << "'\n";
      return kExitInputError;
    }
    write_sweep_csv(file, scenario, rows);
  } else {
    write_sweep_csv(out, scenario, rows);
  }
  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.failed() ? 1 : 0;
  if (failed) err << "warning: " << failed << " of " << rows.size() << " rows failed\n";
  return kExitOk;
}

}  // namespace popweave::cli
