#include "popweave/bn_io.hpp"

#include "popweave/error.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

namespace popweave {

using nlohmann::json;

namespace {

void reject_unknown_fields(const json& object, const std::set<std::string>& allowed,
                           const std::string& context) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError(context, "unknown field '" + it.key() + "'");
    }
  }
}

std::vector<std::string> string_list(const json& node, const std::string& context) {
  if (!node.is_array()) throw ParseError(context, "expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_string()) {
      throw ParseError(context + "[" + std::to_string(i) + "]", "expected a string");
    }
    out.push_back(node[i].get<std::string>());
  }
  return out;
}

Variable parse_variable(const json& node, const std::string& context) {
  if (!node.is_object()) throw ParseError(context, "expected an object");
  reject_unknown_fields(node, {"name", "domain", "parents", "cpt"}, context);
  for (const char* field : {"name", "domain", "cpt"}) {
    if (!node.contains(field)) throw ParseError(context, std::string("missing field '") + field + "'");
  }
  Variable v;
  if (!node["name"].is_string()) throw ParseError(context + ".name", "expected a string");
  v.name = node["name"].get<std::string>();
  if (v.name.empty()) throw ParseError(context + ".name", "empty variable name");
  v.domain = string_list(node["domain"], context + ".domain");
  if (node.contains("parents")) v.parents = string_list(node["parents"], context + ".parents");

  const json& rows = node["cpt"];
  const std::string cpt_context = context + ".cpt";
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(cpt_context, "expected a non-empty list of rows");
  }
  const auto cols = static_cast<Eigen::Index>(v.domain.size());
  v.cpt.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string row_context = cpt_context + "[" + std::to_string(r) + "]";
    const json& row = rows[r];
    if (!row.is_array()) throw ParseError(row_context, "expected a list of numbers");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(row_context, "shape mismatch in variable '" + v.name + "': row has " +
                                        std::to_string(row.size()) + " entries, domain has " +
                                        std::to_string(cols));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) {
        throw ParseError(row_context + "[" + std::to_string(c) + "]", "expected a number");
      }
      const double e = row[c].get<double>();
      v.cpt(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e;
      sum += e;
    }
    // Rows off by summation rounding only are kept verbatim so that
    // serialize/parse is a fixed point.
    const double gap = std::abs(sum - 1.0);
    if (sum > 0.0 && gap > 8 * std::numeric_limits<double>::epsilon() &&
        gap <= kRowSumTolerance) {
      v.cpt.row(static_cast<Eigen::Index>(r)) /= sum;
    }
  }
  return v;
}

}  // namespace

BayesianNetwork parse_bn_unchecked(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed document: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ParseError("", "document must be an object");
  reject_unknown_fields(doc, {"format_version", "variables"}, "");
  if (doc.contains("format_version")) {
    if (!doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != kFormatVersion) {
      throw ParseError("format_version", "unsupported format version");
    }
  }
  if (!doc.contains("variables") || !doc["variables"].is_array()) {
    throw ParseError("variables", "expected a list of variables");
  }
  std::vector<Variable> variables;
  std::set<std::string> names;
  const json& list = doc["variables"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string context = "variables[" + std::to_string(i) + "]";
    Variable v = parse_variable(list[i], context);
    if (!names.insert(v.name).second) {
      throw ParseError(context, "duplicate variable name '" + v.name + "'");
    }
    variables.push_back(std::move(v));
  }
  return BayesianNetwork(std::move(variables));
}

BayesianNetwork parse_bn(std::string_view text) {
  BayesianNetwork bn = parse_bn_unchecked(text);
  const auto report = validate_network(bn);
  if (!report.ok()) {
    const auto& first = report.problems.front();
    std::string message = first.message;
    if (first.kind == ProblemKind::shape_mismatch) message = "shape mismatch: " + message;
    if (report.problems.size() > 1) {
      message += " (and " + std::to_string(report.problems.size() - 1) + " more)";
    }
    throw ParseError("variable '" + first.variable + "'", message);
  }
  return bn;
}

std::string serialize_bn(const BayesianNetwork& bn) {
  std::ostringstream out;
  out << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"variables\": [";
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const Variable& v = bn.variable(i);
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\n      \"name\": " << json(v.name).dump() << ",\n";
    out << "      \"domain\": " << json(v.domain).dump() << ",\n";
    out << "      \"parents\": " << json(v.parents).dump() << ",\n";
    out << "      \"cpt\": [";
    for (Eigen::Index r = 0; r < v.cpt.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < v.cpt.cols(); ++c) row.push_back(v.cpt(r, c));
      out << (r == 0 ? "\n" : ",\n") << "        " << row.dump();
    }
    out << "\n      ]\n    }";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

BayesianNetwork load_bn(const std::filesystem::path& path) {
  try {
    return parse_bn(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + (e.context().empty() ? "" : ": " + e.context()), e.message());
  }
}

}  // namespace popweave
