#include "popweave/population.hpp"

#include "popweave/error.hpp"
#include "popweave/inference.hpp"
#include "popweave/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <thread>

namespace popweave {

std::optional<int> parse_capacity_label(std::string_view label) {
  int value = 0;
  auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (ec != std::errc() || end != label.data() + label.size() || value < 0) return std::nullopt;
  return value;
}

namespace {

int read_rule(const BayesianNetwork& bn, const Assignment& attributes, const CapacityRule& rule,
              AgentId id) {
  if (!rule.attribute) return rule.constant;
  const Variable& v = bn.variable(*rule.attribute);
  const auto& label = v.domain[static_cast<std::size_t>(attributes[*rule.attribute])];
  auto value = parse_capacity_label(label);
  if (!value) {
    throw Error("agent " + std::to_string(id) + ": attribute '" + v.name + "' value '" + label +
                "' is not a non-negative integer");
  }
  return *value;
}

}  // namespace

std::vector<Capacity> read_capacities(const BayesianNetwork& bn, const Assignment& attributes,
                                      std::span<const LinkCapacity> capacities, AgentId id) {
  std::vector<Capacity> result;
  result.reserve(capacities.size());
  for (const auto& c : capacities) {
    result.push_back({read_rule(bn, attributes, c.side_a, id),
                      read_rule(bn, attributes, c.side_b, id)});
  }
  return result;
}

Population generate_population(const BayesianNetwork& bn, std::size_t n, std::uint64_t seed,
                               std::span<const LinkCapacity> capacities) {
  if (n == 0) throw Error("population size must be at least 1");
  const auto order = topological_order(bn);
  Population pop;
  pop.agents.resize(n);

  const std::size_t chunks = (n + kGenerationChunk - 1) / kGenerationChunk;
  auto fill_chunk = [&](std::size_t chunk) {
    Rng rng = make_stream(seed, population_stream(chunk));
    const std::size_t begin = chunk * kGenerationChunk;
    const std::size_t end = std::min(n, begin + kGenerationChunk);
    for (std::size_t i = begin; i < end; ++i) {
      pop.agents[i].id = static_cast<AgentId>(i);
      pop.agents[i].attributes = sample_ancestral(bn, order, rng);
    }
  };

  const std::size_t workers = std::min(worker_count(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fill_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) fill_chunk(c);
      });
    }
    for (auto& t : threads) t.join();
  }

  for (auto& agent : pop.agents) {
    agent.capacity = read_capacities(bn, agent.attributes, capacities, agent.id);
    agent.remaining_capacity = agent.capacity;
  }
  return pop;
}

std::vector<EmpiricalTable> empirical_conditionals(const BayesianNetwork& bn,
                                                   const Population& pop) {
  std::vector<EmpiricalTable> tables;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const auto rows = static_cast<Eigen::Index>(bn.row_count(i));
    const auto cols = static_cast<Eigen::Index>(bn.variable(i).cardinality());
    tables.push_back({Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)});
  }
  for (const auto& agent : pop.agents) {
    if (agent.attributes.size() != bn.size()) {
      throw Error("agent " + std::to_string(agent.id) + " does not carry every attribute");
    }
    for (std::size_t i = 0; i < bn.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(bn.row_of(i, agent.attributes));
      tables[i].frequencies(row, agent.attributes[i]) += 1.0;
      tables[i].counts[row] += 1.0;
    }
  }
  for (auto& t : tables) {
    for (Eigen::Index r = 0; r < t.counts.size(); ++r) {
      if (t.counts[r] > 0.0) t.frequencies.row(r) /= t.counts[r];
    }
  }
  return tables;
}

BayesianNetwork learn_network(const BayesianNetwork& bn, std::span<const EmpiricalTable> tables) {
  std::vector<Variable> variables = bn.variables();
  for (std::size_t i = 0; i < variables.size(); ++i) {
    for (Eigen::Index r = 0; r < tables[i].counts.size(); ++r) {
      if (tables[i].observed(r)) variables[i].cpt.row(r) = tables[i].frequencies.row(r);
    }
  }
  return BayesianNetwork(std::move(variables));
}

AttributeIndex::AttributeIndex(const Population& pop, std::vector<std::size_t> attributes)
    : attributes_(std::move(attributes)) {
  for (const auto& agent : pop.agents) buckets_[key_of(agent)].push_back(agent.id);
}

StateVector AttributeIndex::key_of(const Agent& agent) const {
  StateVector key;
  key.reserve(attributes_.size());
  for (auto a : attributes_) key.push_back(agent.attributes[a]);
  return key;
}

const std::vector<AgentId>& AttributeIndex::lookup(const StateVector& key) const {
  static const std::vector<AgentId> empty;
  auto it = buckets_.find(key);
  return it == buckets_.end() ? empty : it->second;
}

void write_population_csv(std::ostream& out, const BayesianNetwork& bn, const Population& pop) {
  out << "id";
  for (const auto& v : bn.variables()) out << ',' << v.name;
  out << '\n';
  for (const auto& agent : pop.agents) {
    out << agent.id;
    for (std::size_t i = 0; i < bn.size(); ++i) {
      out << ',' << bn.variable(i).domain[static_cast<std::size_t>(agent.attributes[i])];
    }
    out << '\n';
  }
}

}  // namespace popweave
