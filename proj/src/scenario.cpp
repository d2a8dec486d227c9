#include "popweave/scenario.hpp"

#include "popweave/bn_io.hpp"
#include "popweave/error.hpp"

#include <json.hpp>

#include <set>

namespace popweave {

using nlohmann::json;

namespace {

void reject_unknown_fields(const json& object, const std::set<std::string>& allowed,
                           const std::string& context) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!allowed.count(it.key())) throw ParseError(context, "unknown field '" + it.key() + "'");
  }
}

const json& require(const json& object, const char* field, const std::string& context) {
  if (!object.contains(field)) {
    throw ParseError(context, std::string("missing field '") + field + "'");
  }
  return object[field];
}

std::string require_string(const json& object, const char* field, const std::string& context) {
  const json& node = require(object, field, context);
  if (!node.is_string()) throw ParseError(context + "." + field, "expected a string");
  return node.get<std::string>();
}

CapacitySource parse_capacity(const json& node, const std::string& context) {
  CapacitySource source;
  if (node.is_string()) {
    source.attribute = node.get<std::string>();
    if (source.attribute.empty()) throw ParseError(context, "empty attribute name");
  } else if (node.is_number_integer() && node.get<long long>() >= 0) {
    source.constant = node.get<int>();
  } else {
    throw ParseError(context, "expected an attribute name or a non-negative integer");
  }
  return source;
}

Orientation parse_orientation(const json& node, const std::string& context) {
  if (!node.is_string()) throw ParseError(context, "expected forward, backward or either");
  const auto s = node.get<std::string>();
  if (s == "forward") return Orientation::forward;
  if (s == "backward") return Orientation::backward;
  if (s == "either") return Orientation::either;
  throw ParseError(context, "unknown orientation '" + s + "'");
}

Hop parse_hop(const json& node, const std::string& context) {
  if (!node.is_object()) throw ParseError(context, "expected an object");
  reject_unknown_fields(node, {"type", "orientation"}, context);
  Hop hop;
  hop.type = require_string(node, "type", context);
  if (node.contains("orientation")) {
    hop.orientation = parse_orientation(node["orientation"], context + ".orientation");
  }
  return hop;
}

LinkTypeSpec parse_link_type(const json& node, const std::string& context) {
  if (!node.is_object()) throw ParseError(context, "expected an object");
  reject_unknown_fields(
      node, {"name", "kind", "directed", "bn", "link_variable", "rc_a", "rc_b", "same"}, context);
  LinkTypeSpec spec;
  spec.name = require_string(node, "name", context);
  const std::string kind = require_string(node, "kind", context);
  if (kind == "matching") {
    spec.kind = LinkKind::matching;
  } else if (kind == "transitive") {
    spec.kind = LinkKind::transitive;
  } else {
    throw ParseError(context + ".kind", "unknown kind '" + kind + "'");
  }
  if (node.contains("directed")) {
    if (!node["directed"].is_boolean()) throw ParseError(context + ".directed", "expected a boolean");
    spec.directed = node["directed"].get<bool>();
  }
  if (node.contains("same")) {
    if (!node["same"].is_boolean()) throw ParseError(context + ".same", "expected a boolean");
    spec.same = node["same"].get<bool>();
  }
  if (spec.kind == LinkKind::matching) {
    spec.bn = require_string(node, "bn", context);
    spec.link_variable = require_string(node, "link_variable", context);
    spec.rc_a = parse_capacity(require(node, "rc_a", context), context + ".rc_a");
    if (spec.same) {
      if (node.contains("rc_b")) {
        spec.rc_b = parse_capacity(node["rc_b"], context + ".rc_b");
        if (spec.rc_b.attribute != spec.rc_a.attribute || spec.rc_b.constant != spec.rc_a.constant) {
          throw ParseError(context + ".rc_b", "a 'same' link type uses rc_a for both endpoints");
        }
      }
      spec.rc_b = spec.rc_a;
      if (spec.directed) throw ParseError(context, "a 'same' link type cannot be directed");
    } else {
      spec.rc_b = parse_capacity(require(node, "rc_b", context), context + ".rc_b");
    }
  } else {
    for (const char* field : {"bn", "link_variable", "rc_a", "rc_b"}) {
      if (node.contains(field)) {
        throw ParseError(context, std::string("transitive link type must not set '") + field + "'");
      }
    }
  }
  return spec;
}

TransitiveRule parse_rule(const json& node, const std::string& context) {
  if (!node.is_object()) throw ParseError(context, "expected an object");
  reject_unknown_fields(node, {"create", "hop1", "hop2", "probability", "create_directed_from"},
                        context);
  TransitiveRule rule;
  rule.create = require_string(node, "create", context);
  rule.hop1 = parse_hop(require(node, "hop1", context), context + ".hop1");
  rule.hop2 = parse_hop(require(node, "hop2", context), context + ".hop2");
  const json& p = require(node, "probability", context);
  if (!p.is_number()) throw ParseError(context + ".probability", "expected a number");
  rule.probability = p.get<double>();
  if (!(rule.probability >= 0.0 && rule.probability <= 1.0)) {
    throw ParseError(context + ".probability", "probability outside [0, 1]");
  }
  if (node.contains("create_directed_from")) {
    const json& from = node["create_directed_from"];
    if (from == "x") {
      rule.create_directed_from = Endpoint::x;
    } else if (from == "z") {
      rule.create_directed_from = Endpoint::z;
    } else {
      throw ParseError(context + ".create_directed_from", "expected \"x\" or \"z\"");
    }
  }
  return rule;
}

void check_cross_references(const ScenarioConfig& config) {
  std::set<std::string> names;
  for (const auto& t : config.link_types) {
    if (!names.insert(t.name).second) throw ConfigError("duplicate link type '" + t.name + "'");
  }
  // Hops may use matched types and types already produced by earlier rules.
  std::set<std::string> available;
  for (const auto& t : config.link_types) {
    if (t.kind == LinkKind::matching) available.insert(t.name);
  }
  for (std::size_t i = 0; i < config.transitive_rules.size(); ++i) {
    const auto& rule = config.transitive_rules[i];
    const std::string where = "transitive rule " + std::to_string(i);
    if (!names.count(rule.create)) {
      throw ConfigError(where + " creates undeclared link type '" + rule.create + "'");
    }
    for (const Hop* hop : {&rule.hop1, &rule.hop2}) {
      if (!names.count(hop->type)) {
        throw ConfigError(where + " references undeclared link type '" + hop->type + "'");
      }
      if (!available.count(hop->type)) {
        throw ConfigError(where + " uses link type '" + hop->type +
                          "' before any matching or earlier rule produces it");
      }
    }
    available.insert(rule.create);
  }
  for (const auto& [name, weight] : config.interaction_weights) {
    if (!names.count(name)) throw ConfigError("interaction weight for undeclared link type '" + name + "'");
    if (!(weight >= 0.0 && weight <= 1.0)) {
      throw ConfigError("interaction weight for '" + name + "' outside [0, 1]");
    }
  }
}

bool integer_domain(const Variable& v) {
  for (const auto& label : v.domain) {
    if (!parse_capacity_label(label)) return false;
  }
  return true;
}

void check_capacity_source(const BayesianNetwork& agent_bn, const CapacitySource& source,
                           const std::string& type_name) {
  if (source.is_constant()) return;
  auto index = agent_bn.find(source.attribute);
  if (!index) {
    throw ConfigError("link type '" + type_name + "': capacity attribute '" + source.attribute +
                      "' is not an agent attribute");
  }
  if (!integer_domain(agent_bn.variable(*index))) {
    throw ConfigError("link type '" + type_name + "': capacity attribute '" + source.attribute +
                      "' has a domain that is not integer-parsable");
  }
}

CapacityRule resolve(const BayesianNetwork& agent_bn, const CapacitySource& source) {
  CapacityRule rule;
  if (source.is_constant()) {
    rule.constant = source.constant;
  } else {
    rule.attribute = agent_bn.index_of(source.attribute);
  }
  return rule;
}

std::string join(const std::vector<std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? "," : "") + labels[i];
  return out + "}";
}

}  // namespace

std::optional<std::size_t> ScenarioConfig::find_type(std::string_view name) const {
  for (std::size_t i = 0; i < link_types.size(); ++i) {
    if (link_types[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<LinkCapacity> LoadedScenario::capacities() const {
  std::vector<LinkCapacity> result;
  for (const auto& t : config.link_types) {
    if (t.kind == LinkKind::matching) {
      result.push_back({resolve(agent_bn, t.rc_a), resolve(agent_bn, t.rc_b)});
    } else {
      result.push_back({});
    }
  }
  return result;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed document: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ParseError("", "document must be an object");
  reject_unknown_fields(doc,
                        {"format_version", "agent_bn", "population_size", "seed", "link_types",
                         "transitive_rules", "interaction_weights"},
                        "");
  if (doc.contains("format_version") && doc["format_version"] != kFormatVersion) {
    throw ParseError("format_version", "unsupported format version");
  }
  ScenarioConfig config;
  config.agent_bn = require_string(doc, "agent_bn", "");
  if (doc.contains("population_size")) {
    const json& n = doc["population_size"];
    if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0) {
      throw ParseError("population_size", "expected a positive integer");
    }
    config.population_size = n.get<std::size_t>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ParseError("seed", "expected a 64-bit unsigned integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  const json& types = require(doc, "link_types", "");
  if (!types.is_array()) throw ParseError("link_types", "expected a list");
  for (std::size_t i = 0; i < types.size(); ++i) {
    config.link_types.push_back(parse_link_type(types[i], "link_types[" + std::to_string(i) + "]"));
  }
  if (doc.contains("transitive_rules")) {
    const json& rules = doc["transitive_rules"];
    if (!rules.is_array()) throw ParseError("transitive_rules", "expected a list");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      config.transitive_rules.push_back(
          parse_rule(rules[i], "transitive_rules[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("interaction_weights")) {
    const json& weights = doc["interaction_weights"];
    if (!weights.is_object()) throw ParseError("interaction_weights", "expected an object");
    for (auto it = weights.begin(); it != weights.end(); ++it) {
      if (!it.value().is_number()) {
        throw ParseError("interaction_weights." + it.key(), "expected a number");
      }
      config.interaction_weights[it.key()] = it.value().get<double>();
    }
  }
  check_cross_references(config);
  return config;
}

void check_matching_contract(const BayesianNetwork& agent_bn, const BayesianNetwork& matching_bn,
                             const std::string& link_variable, const std::string& type_name) {
  const std::string where = "link type '" + type_name + "': ";
  for (const auto& v : matching_bn.variables()) {
    if (v.name.rfind("a1.", 0) != 0 && v.name.rfind("a2.", 0) != 0) continue;
    const std::string attribute = v.name.substr(3);
    auto index = agent_bn.find(attribute);
    if (!index) {
      throw ConfigError(where + "matching variable '" + v.name + "' names unknown agent attribute '" +
                        attribute + "'");
    }
    const auto& expected = agent_bn.variable(*index).domain;
    if (v.domain != expected) {
      throw ConfigError(where + "matching variable '" + v.name + "' has domain " + join(v.domain) +
                        ", expected " + join(expected));
    }
  }
  auto link = matching_bn.find(link_variable);
  if (!link) throw ConfigError(where + "link variable '" + link_variable + "' not found");
  if (!matching_bn.variable(*link).state_of("yes")) {
    throw ConfigError(where + "link variable '" + link_variable + "' has no \"yes\" label (domain " +
                      join(matching_bn.variable(*link).domain) + ")");
  }
}

LoadedScenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  LoadedScenario scenario;
  scenario.config = parse_scenario_config(text);
  scenario.base_dir = base_dir;
  scenario.agent_bn = load_bn(base_dir / scenario.config.agent_bn);
  for (const auto& spec : scenario.config.link_types) {
    if (spec.kind != LinkKind::matching) {
      scenario.matching_bns.emplace_back();
      continue;
    }
    check_capacity_source(scenario.agent_bn, spec.rc_a, spec.name);
    check_capacity_source(scenario.agent_bn, spec.rc_b, spec.name);
    BayesianNetwork matching = load_bn(base_dir / spec.bn);
    check_matching_contract(scenario.agent_bn, matching, spec.link_variable, spec.name);
    scenario.matching_bns.emplace_back(std::move(matching));
  }
  return scenario;
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(read_text_file(path), path.parent_path());
  } catch (const ParseError& e) {
    if (e.context().rfind(path.string(), 0) == 0) throw;
    throw ParseError(path.string() + (e.context().empty() ? "" : ": " + e.context()), e.message());
  }
}

}  // namespace popweave
