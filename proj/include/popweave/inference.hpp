#pragma once

#include "popweave/bayes_net.hpp"
#include "popweave/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace popweave {

/// A non-negative table over a set of network variables.
///
/// `scope` holds variable indices in ascending order; `values` is laid out
/// row-major over the scope, last variable fastest.
struct Factor {
  std::vector<std::size_t> scope;
  std::vector<int> cards;
  Eigen::ArrayXd values = Eigen::ArrayXd::Ones(1);

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  /// Position of `states` (indexed by network variable) in `values`.
  std::size_t offset(const StateVector& states) const;
  /// Decodes a flat position into per-scope states.
  std::vector<int> states_at(std::size_t position) const;
};

Factor multiply(const Factor& lhs, const Factor& rhs);
Factor sum_out(const Factor& f, std::size_t variable);
/// Fixes `variable` to `state` and drops it from the scope.
Factor reduce(const Factor& f, std::size_t variable, int state);

/// Unnormalized factor over `keep` after summing every other unobserved
/// variable out of the evidence-reduced joint (variable elimination with a
/// min-degree order over the ancestral closure of `keep` and the evidence).
/// Its total mass equals p(evidence). `keep` must not contain observed
/// variables.
Factor eliminate(const BayesianNetwork& bn, const StateVector& evidence,
                 std::span<const std::size_t> keep);

/// p(evidence); exactly 0 when below `kZeroProbability`.
double probability_of_evidence(const BayesianNetwork& bn, const StateVector& evidence);
double probability_of_evidence(const BayesianNetwork& bn, const Evidence& evidence);

/// p(target | evidence). Throws `ImpossibleEvidence` when p(evidence) = 0.
Eigen::VectorXd posterior_marginal(const BayesianNetwork& bn, const StateVector& evidence,
                                   std::size_t target);
Eigen::VectorXd posterior_marginal(const BayesianNetwork& bn, const Evidence& evidence,
                                   const std::string& target);

/// Normalized p(query | evidence) as a factor over the unobserved query
/// variables; entries below `kZeroProbability` are zeroed. Throws
/// `ImpossibleEvidence` when p(evidence) = 0.
Factor posterior_joint(const BayesianNetwork& bn, const StateVector& evidence,
                       std::span<const std::size_t> query);

/// One total assignment drawn from p(. | evidence): unobserved variables are
/// visited in topological order and drawn from their posterior given the
/// evidence so far, each draw then joining the evidence. With no evidence
/// this is ancestral sampling from CPT rows.
Assignment sample_assignment(const BayesianNetwork& bn, const StateVector& evidence, Rng& rng);
Assignment sample_assignment(const BayesianNetwork& bn, const Evidence& evidence, Rng& rng);

/// Ancestral draw along a precomputed topological order.
Assignment sample_ancestral(const BayesianNetwork& bn, std::span<const std::size_t> order,
                            Rng& rng);

}  // namespace popweave
