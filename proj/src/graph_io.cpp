#include "popweave/graph_io.hpp"

#include "popweave/bn_io.hpp"
#include "popweave/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace popweave {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_graphml(std::ostream& out, const BayesianNetwork& bn, const SocialGraph& graph) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  for (std::size_t i = 0; i < bn.size(); ++i) {
    out << "  <key id=\"v" << i << "\" for=\"node\" attr.name=\""
        << xml_escape(bn.variable(i).name) << "\" attr.type=\"string\"/>\n";
  }
  out << "  <key id=\"type\" for=\"edge\" attr.name=\"type\" attr.type=\"string\"/>\n"
         "  <key id=\"provenance\" for=\"edge\" attr.name=\"provenance\" attr.type=\"string\"/>\n"
         "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (const auto& agent : graph.population.agents) {
    out << "    <node id=\"n" << agent.id << "\">";
    for (std::size_t i = 0; i < agent.attributes.size() && i < bn.size(); ++i) {
      out << "<data key=\"v" << i << "\">"
          << xml_escape(bn.variable(i).domain[static_cast<std::size_t>(agent.attributes[i])])
          << "</data>";
    }
    out << "</node>\n";
  }
  for (std::size_t t = 0; t < graph.types.size(); ++t) {
    const bool directed = graph.types[t].directed;
    for (const auto& link : graph.links[t].links()) {
      out << "    <edge source=\"n" << link.a << "\" target=\"n" << link.b << '"'
          << (directed ? " directed=\"true\"" : "") << "><data key=\"type\">"
          << xml_escape(graph.types[t].name) << "</data><data key=\"provenance\">"
          << to_string(link.provenance) << "</data></edge>\n";
    }
  }
  out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const BayesianNetwork& bn, const SocialGraph& graph) {
  out << "graph population {\n  node [shape=circle, fontsize=8];\n";
  const auto gender = bn.find("gender");
  const auto age = bn.find("ageDetail");
  for (const auto& agent : graph.population.agents) {
    out << "  n" << agent.id;
    // Labels like "M54" when gender and age attributes are present.
    if (gender && age && agent.attributes.size() == bn.size()) {
      const auto& g = bn.variable(*gender).domain[static_cast<std::size_t>(agent.attributes[*gender])];
      const auto& a = bn.variable(*age).domain[static_cast<std::size_t>(agent.attributes[*age])];
      std::string label = g.empty() ? "" : std::string(1, static_cast<char>(std::toupper(g[0])));
      out << " [label=\"" << dot_escape(label + a) << "\"]";
    }
    out << ";\n";
  }
  for (std::size_t t = 0; t < graph.types.size(); ++t) {
    const char* color = kPalette[t % std::size(kPalette)];
    const bool directed = graph.types[t].directed;
    for (const auto& link : graph.links[t].links()) {
      out << "  n" << link.a << " -- n" << link.b << " [color=\"" << color << "\", label=\""
          << dot_escape(graph.types[t].name) << '"' << (directed ? ", dir=forward" : "") << "];\n";
    }
  }
  out << "}\n";
}

void write_edges_csv(std::ostream& out, const SocialGraph& graph) {
  out << "source,target,type,provenance\n";
  for (std::size_t t = 0; t < graph.types.size(); ++t) {
    for (const auto& link : graph.links[t].links()) {
      out << link.a << ',' << link.b << ',' << graph.types[t].name << ','
          << to_string(link.provenance) << '\n';
    }
  }
}

void write_type_edges_csv(std::ostream& out, const SocialGraph& graph, std::size_t type) {
  out << "source,target,provenance\n";
  for (const auto& link : graph.links[type].links()) {
    out << link.a << ',' << link.b << ',' << to_string(link.provenance) << '\n';
  }
}

void write_matching_report_csv(std::ostream& out, const MatchingReport& report) {
  out << "type,required,created,orphans,fallbacks,error_rate,unsatisfiable\n";
  out.precision(10);
  for (const auto& t : report.types) {
    out << t.type << ',' << t.required << ',' << t.created << ',' << t.orphans << ','
        << t.fallbacks << ',' << t.error_rate() << ',' << (t.unsatisfiable ? 1 : 0) << '\n';
  }
}

void write_stats_csv(std::ostream& out, const GraphStats& stats) {
  out.precision(10);
  out << "metric,value\n"
      << "nodes," << stats.nodes << '\n'
      << "edges," << stats.edges << '\n'
      << "density," << stats.density << '\n'
      << "transitivity," << stats.transitivity << '\n'
      << "triangles," << stats.triangles << '\n'
      << "connected_triples," << stats.connected_triples << '\n'
      << "avg_path_length," << stats.avg_path_length << '\n'
      << "path_sources," << stats.path_sources << '\n'
      << "components," << stats.component_sizes.size() << '\n'
      << "largest_component," << (stats.component_sizes.empty() ? 0 : stats.component_sizes[0])
      << '\n'
      << "mean_degree," << stats.overall.mean << '\n';
  for (const auto& t : stats.per_type) out << "mean_degree." << t.type << ',' << t.mean << '\n';
}

SocialGraph read_edge_files(const std::vector<std::filesystem::path>& files,
                            std::size_t node_count) {
  SocialGraph graph;
  std::size_t max_id_plus_one = 0;
  std::vector<TypedLink> pending;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open file '" + file.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(file.string(), "missing header");
    const auto header = split_csv_line(line);
    int source_col = -1, target_col = -1, type_col = -1, provenance_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == "source") source_col = static_cast<int>(c);
      if (header[c] == "target") target_col = static_cast<int>(c);
      if (header[c] == "type") type_col = static_cast<int>(c);
      if (header[c] == "provenance") provenance_col = static_cast<int>(c);
    }
    if (source_col < 0 || target_col < 0) {
      throw ParseError(file.string() + ":1", "header needs 'source' and 'target' columns");
    }
    std::string default_type = "link";
    const std::string stem = file.stem().string();
    if (stem.rfind("edges_", 0) == 0) default_type = stem.substr(6);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = split_csv_line(line);
      const std::string where = file.string() + ":" + std::to_string(line_no);
      auto field = [&](int col) -> const std::string& {
        if (col >= static_cast<int>(fields.size())) throw ParseError(where, "missing column");
        return fields[static_cast<std::size_t>(col)];
      };
      auto parse_id = [&](const std::string& s) {
        AgentId id = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
        if (ec != std::errc() || end != s.data() + s.size()) {
          throw ParseError(where, "invalid agent id '" + s + "'");
        }
        return id;
      };
      const AgentId a = parse_id(field(source_col));
      const AgentId b = parse_id(field(target_col));
      const std::string type = type_col >= 0 ? field(type_col) : default_type;
      Provenance provenance = Provenance::sampled;
      if (provenance_col >= 0) {
        const auto& p = field(provenance_col);
        if (p == "fallback") provenance = Provenance::fallback;
        if (p == "transitive") provenance = Provenance::transitive;
      }
      auto t = graph.find_type(type);
      if (!t) t = graph.add_type(type, false);
      pending.push_back({*t, a, b, provenance});
      max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(a, b) + std::size_t{1});
    }
  }
  const std::size_t n = std::max(node_count, max_id_plus_one);
  graph.population.agents.resize(n);
  for (std::size_t i = 0; i < n; ++i) graph.population.agents[i].id = static_cast<AgentId>(i);
  for (const auto& link : pending) graph.links[link.type].insert(link);
  return graph;
}

std::size_t count_csv_rows(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open file '" + file.string() + "'");
  std::string line;
  std::size_t rows = 0;
  if (!std::getline(in, line)) return 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") ++rows;
  }
  return rows;
}

}  // namespace popweave
