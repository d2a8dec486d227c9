#include "popweave/bayes_net.hpp"

#include "popweave/error.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace popweave {

std::optional<int> Variable::state_of(std::string_view label) const {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

BayesianNetwork::BayesianNetwork(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    by_name_.try_emplace(variables_[i].name, i);
  }
  parents_.resize(variables_.size());
  children_.resize(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    for (const auto& parent : variables_[i].parents) {
      auto it = by_name_.find(parent);
      int index = it == by_name_.end() ? -1 : static_cast<int>(it->second);
      parents_[i].push_back(index);
      if (index >= 0) children_[static_cast<std::size_t>(index)].push_back(i);
    }
  }
}

std::optional<std::size_t> BayesianNetwork::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t BayesianNetwork::index_of(std::string_view name) const {
  auto index = find(name);
  if (!index) throw Error("unknown variable '" + std::string(name) + "'");
  return *index;
}

std::size_t BayesianNetwork::row_of(std::size_t i, const StateVector& states) const {
  std::size_t row = 0;
  for (int parent : parents_[i]) {
    const auto p = static_cast<std::size_t>(parent);
    row = row * variables_[p].domain.size() + static_cast<std::size_t>(states[p]);
  }
  return row;
}

std::size_t BayesianNetwork::row_count(std::size_t i) const {
  std::size_t rows = 1;
  for (int parent : parents_[i]) {
    if (parent >= 0) rows *= variables_[static_cast<std::size_t>(parent)].domain.size();
  }
  return rows;
}

StateVector BayesianNetwork::to_states(const Evidence& evidence) const {
  StateVector states(size(), kUnobserved);
  for (const auto& [name, label] : evidence) {
    auto index = find(name);
    if (!index) throw Error("evidence on unknown variable '" + name + "'");
    auto state = variables_[*index].state_of(label);
    if (!state) {
      throw Error("evidence value '" + label + "' is not in the domain of '" + name + "'");
    }
    states[*index] = *state;
  }
  return states;
}

Evidence BayesianNetwork::to_labels(const Assignment& assignment) const {
  Evidence labels;
  for (std::size_t i = 0; i < size(); ++i) {
    if (assignment[i] == kUnobserved) continue;
    labels[variables_[i].name] = variables_[i].domain[static_cast<std::size_t>(assignment[i])];
  }
  return labels;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& p : problems) out << p.variable << ": " << p.message << '\n';
  return out.str();
}

namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

// Kahn's algorithm with a min-heap on declaration index. Returns the order
// of every variable that is not on or downstream of a cycle.
std::vector<std::size_t> kahn_order(const BayesianNetwork& bn) {
  const std::size_t n = bn.size();
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int p : bn.parent_indices(i)) {
      if (p >= 0) ++pending[i];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t child : bn.child_indices(v)) {
      // A child may list the same parent twice; each listing is one edge.
      if (--pending[child] == 0) ready.push(child);
    }
  }
  return order;
}

// First variable (declaration order) that lies on a directed cycle.
std::optional<std::size_t> find_cycle_member(const BayesianNetwork& bn) {
  auto order = kahn_order(bn);
  if (order.size() == bn.size()) return std::nullopt;
  std::vector<bool> done(bn.size(), false);
  for (auto v : order) done[v] = true;
  // Leftover nodes include cycle members and their descendants; walking
  // parents from any leftover node must revisit a node.
  for (std::size_t start = 0; start < bn.size(); ++start) {
    if (done[start]) continue;
    std::vector<int> seen_at(bn.size(), -1);
    std::size_t v = start;
    int step = 0;
    while (seen_at[v] < 0) {
      seen_at[v] = step++;
      std::optional<std::size_t> next;
      for (int p : bn.parent_indices(v)) {
        if (p >= 0 && !done[static_cast<std::size_t>(p)]) {
          next = static_cast<std::size_t>(p);
          break;
        }
      }
      if (!next) break;
      v = *next;
    }
    if (seen_at[v] >= 0) {
      // v starts the cycle; report its smallest-index member.
      std::size_t best = v;
      std::size_t u = v;
      do {
        for (int p : bn.parent_indices(u)) {
          if (p >= 0 && !done[static_cast<std::size_t>(p)]) {
            u = static_cast<std::size_t>(p);
            break;
          }
        }
        best = std::min(best, u);
      } while (u != v);
      return best;
    }
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_network(const BayesianNetwork& bn) {
  ValidationReport report;
  auto add = [&](const std::string& var, ProblemKind kind, std::string msg) {
    report.problems.push_back({var, kind, std::move(msg)});
  };

  std::set<std::string> names;
  for (const auto& v : bn.variables()) {
    if (!names.insert(v.name).second) {
      add(v.name, ProblemKind::duplicate_name, "duplicate variable name");
    }
  }

  bool parents_resolved = true;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const Variable& v = bn.variable(i);
    if (v.domain.empty()) add(v.name, ProblemKind::empty_domain, "empty domain");
    std::set<std::string> labels(v.domain.begin(), v.domain.end());
    if (labels.size() != v.domain.size()) {
      add(v.name, ProblemKind::duplicate_label, "duplicate domain label");
    }
    bool shape_known = true;
    for (std::size_t k = 0; k < v.parents.size(); ++k) {
      int p = bn.parent_indices(i)[k];
      if (p < 0) {
        add(v.name, ProblemKind::dangling_parent, "unknown parent '" + v.parents[k] + "'");
        parents_resolved = false;
        shape_known = false;
      } else if (static_cast<std::size_t>(p) == i) {
        add(v.name, ProblemKind::self_parent, "variable is its own parent");
      }
    }
    if (!shape_known) continue;

    const auto rows = static_cast<Eigen::Index>(bn.row_count(i));
    const auto cols = static_cast<Eigen::Index>(v.domain.size());
    if (v.cpt.rows() != rows || v.cpt.cols() != cols) {
      std::ostringstream msg;
      msg << "cpt shape " << v.cpt.rows() << "x" << v.cpt.cols() << ", expected " << rows << "x"
          << cols;
      add(v.name, ProblemKind::shape_mismatch, msg.str());
      continue;
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      bool in_range = true;
      for (Eigen::Index c = 0; c < cols; ++c) {
        double e = v.cpt(r, c);
        if (!(e >= 0.0 && e <= 1.0)) in_range = false;
      }
      if (!in_range) {
        add(v.name, ProblemKind::entry_out_of_range,
            "row " + std::to_string(r) + " has an entry outside [0, 1]");
        continue;
      }
      double sum = v.cpt.row(r).sum();
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        add(v.name, ProblemKind::row_sum,
            "row sum " + format_number(sum) + " ≠ 1 (row " + std::to_string(r) + ")");
      }
    }
  }

  if (parents_resolved) {
    if (auto member = find_cycle_member(bn)) {
      add(bn.variable(*member).name, ProblemKind::cycle, "cycle");
    }
  }
  return report;
}

std::vector<std::size_t> topological_order(const BayesianNetwork& bn) {
  auto order = kahn_order(bn);
  if (order.size() != bn.size()) {
    auto member = find_cycle_member(bn);
    std::string name = member ? bn.variable(*member).name : std::string("?");
    throw CycleError(name, "cycle through variable '" + name + "'");
  }
  return order;
}

std::vector<std::string> topological_names(const BayesianNetwork& bn) {
  std::vector<std::string> names;
  for (auto i : topological_order(bn)) names.push_back(bn.variable(i).name);
  return names;
}

double joint_probability(const BayesianNetwork& bn, const Assignment& assignment) {
  double p = 1.0;
  for (std::size_t i = 0; i < bn.size() && p > 0.0; ++i) {
    p *= bn.probability(i, assignment[i], assignment);
  }
  return p;
}

std::vector<std::pair<Assignment, double>> enumerate_joint(const BayesianNetwork& bn,
                                                           std::size_t cap) {
  // Saturating product so the reported count never wraps.
  long double total = 1.0L;
  for (const auto& v : bn.variables()) total *= static_cast<long double>(v.domain.size());
  if (total > static_cast<long double>(cap)) {
    std::ostringstream msg;
    msg.precision(20);
    msg << "joint state space of " << total << " states exceeds enumeration cap of " << cap;
    throw CapacityExceeded(msg.str());
  }
  const auto states = static_cast<std::size_t>(total);
  std::vector<std::pair<Assignment, double>> table;
  table.reserve(states);
  Assignment a(bn.size(), 0);
  for (std::size_t k = 0; k < states; ++k) {
    table.emplace_back(a, joint_probability(bn, a));
    for (std::size_t i = bn.size(); i-- > 0;) {
      if (++a[i] < bn.variable(i).cardinality()) break;
      a[i] = 0;
    }
  }
  return table;
}

}  // namespace popweave
