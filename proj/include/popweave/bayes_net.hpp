#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace popweave {

/// Tolerance on CPT row sums. Rows within it are renormalized on parse.
inline constexpr double kRowSumTolerance = 1e-9;
/// Probabilities below this are treated as exact zeros (support tests).
inline constexpr double kZeroProbability = 1e-12;
/// Default cap on the state count of exhaustive enumeration.
inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// One state index per network variable, aligned with declaration order.
/// `kUnobserved` marks a variable without evidence.
using StateVector = std::vector<int>;
inline constexpr int kUnobserved = -1;

/// A total assignment (every entry is a valid state index).
using Assignment = StateVector;

/// Evidence by name: variable name -> category label.
using Evidence = std::map<std::string, std::string>;

/// A discrete random variable with its conditional probability table.
///
/// `cpt` has one row per parent configuration and one column per domain
/// label. Parent configurations are enumerated row-major over `parents`,
/// with the last-listed parent varying fastest.
struct Variable {
  std::string name;
  std::vector<std::string> domain;
  std::vector<std::string> parents;
  Eigen::MatrixXd cpt;

  int cardinality() const { return static_cast<int>(domain.size()); }
  std::optional<int> state_of(std::string_view label) const;
};

/// A discrete Bayesian network. Construction never fails: structural
/// problems (dangling parents, cycles, bad rows) are reported by
/// `validate_network`. Algorithms assume a validated network.
class BayesianNetwork {
 public:
  BayesianNetwork() = default;
  explicit BayesianNetwork(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t i) const { return variables_[i]; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Like `find`, but throws `Error` for an unknown name.
  std::size_t index_of(std::string_view name) const;

  /// Parent indices of variable `i`; -1 marks a name that does not resolve.
  const std::vector<int>& parent_indices(std::size_t i) const { return parents_[i]; }
  /// Indices of variables listing `i` as a parent.
  const std::vector<std::size_t>& child_indices(std::size_t i) const { return children_[i]; }

  /// CPT row of variable `i` selected by the parent states in `states`.
  std::size_t row_of(std::size_t i, const StateVector& states) const;
  double probability(std::size_t i, int state, const StateVector& states) const {
    return variables_[i].cpt(static_cast<Eigen::Index>(row_of(i, states)), state);
  }

  /// Number of parent configurations of variable `i`.
  std::size_t row_count(std::size_t i) const;

  /// Converts name-keyed evidence to a state vector; throws `Error` on an
  /// unknown variable or label.
  StateVector to_states(const Evidence& evidence) const;
  /// Labels of a total assignment, keyed by variable name.
  Evidence to_labels(const Assignment& assignment) const;

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

enum class ProblemKind {
  duplicate_name,
  empty_domain,
  duplicate_label,
  dangling_parent,
  self_parent,
  shape_mismatch,
  entry_out_of_range,
  row_sum,
  cycle,
};

struct Problem {
  std::string variable;
  ProblemKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Problem> problems;
  bool ok() const { return problems.empty(); }
  std::string to_string() const;
};

ValidationReport validate_network(const BayesianNetwork& bn);

/// Parents before children; ties broken by declaration order.
/// Throws `CycleError` naming one cycle member.
std::vector<std::size_t> topological_order(const BayesianNetwork& bn);
std::vector<std::string> topological_names(const BayesianNetwork& bn);

/// Product of the CPT entries selected by a total assignment.
double joint_probability(const BayesianNetwork& bn, const Assignment& assignment);

/// Every total assignment with its probability, odometer order over the
/// declaration order (last variable fastest). Throws `CapacityExceeded`
/// when the state count exceeds `cap`.
std::vector<std::pair<Assignment, double>> enumerate_joint(
    const BayesianNetwork& bn, std::size_t cap = kDefaultEnumerationCap);

}  // namespace popweave
