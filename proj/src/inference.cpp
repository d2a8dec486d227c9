#include "popweave/inference.hpp"

#include "popweave/error.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace popweave {

namespace {

// Stride of each variable of `target_scope` inside `f` (0 when absent).
std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::size_t>& target_scope) {
  std::vector<std::size_t> own(f.scope.size());
  std::size_t stride = 1;
  for (std::size_t k = f.scope.size(); k-- > 0;) {
    own[k] = stride;
    stride *= static_cast<std::size_t>(f.cards[k]);
  }
  std::vector<std::size_t> result(target_scope.size(), 0);
  for (std::size_t t = 0; t < target_scope.size(); ++t) {
    auto it = std::lower_bound(f.scope.begin(), f.scope.end(), target_scope[t]);
    if (it != f.scope.end() && *it == target_scope[t]) {
      result[t] = own[static_cast<std::size_t>(it - f.scope.begin())];
    }
  }
  return result;
}

std::size_t table_size(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

// Walks every position of a table with `cards`, maintaining one linear
// offset per stride vector, and calls visit(position, offsets).
template <std::size_t N, typename Visit>
void odometer(const std::vector<int>& cards,
              const std::array<const std::vector<std::size_t>*, N>& strides, Visit visit) {
  const std::size_t k = cards.size();
  const std::size_t total = table_size(cards);
  std::vector<int> counter(k, 0);
  std::array<std::size_t, N> offsets{};
  for (std::size_t pos = 0; pos < total; ++pos) {
    visit(pos, offsets);
    for (std::size_t j = k; j-- > 0;) {
      ++counter[j];
      for (std::size_t s = 0; s < N; ++s) offsets[s] += (*strides[s])[j];
      if (counter[j] < cards[j]) break;
      for (std::size_t s = 0; s < N; ++s) {
        offsets[s] -= (*strides[s])[j] * static_cast<std::size_t>(cards[j]);
      }
      counter[j] = 0;
    }
  }
}

Factor cpt_factor(const BayesianNetwork& bn, std::size_t i) {
  Factor f;
  f.scope.push_back(i);
  for (int p : bn.parent_indices(i)) f.scope.push_back(static_cast<std::size_t>(p));
  std::sort(f.scope.begin(), f.scope.end());
  f.scope.erase(std::unique(f.scope.begin(), f.scope.end()), f.scope.end());
  for (auto v : f.scope) f.cards.push_back(bn.variable(v).cardinality());
  f.values.resize(static_cast<Eigen::Index>(table_size(f.cards)));

  const auto& cpt = bn.variable(i).cpt;
  StateVector states(bn.size(), 0);
  const std::size_t total = f.size();
  std::vector<int> counter(f.scope.size(), 0);
  for (std::size_t pos = 0; pos < total; ++pos) {
    for (std::size_t k = 0; k < f.scope.size(); ++k) states[f.scope[k]] = counter[k];
    f.values[static_cast<Eigen::Index>(pos)] =
        cpt(static_cast<Eigen::Index>(bn.row_of(i, states)), states[i]);
    for (std::size_t j = counter.size(); j-- > 0;) {
      if (++counter[j] < f.cards[j]) break;
      counter[j] = 0;
    }
  }
  return f;
}

std::vector<bool> ancestral_closure(const BayesianNetwork& bn, std::vector<std::size_t> seeds) {
  std::vector<bool> in(bn.size(), false);
  while (!seeds.empty()) {
    std::size_t v = seeds.back();
    seeds.pop_back();
    if (in[v]) continue;
    in[v] = true;
    for (int p : bn.parent_indices(v)) {
      if (p >= 0 && !in[static_cast<std::size_t>(p)]) seeds.push_back(static_cast<std::size_t>(p));
    }
  }
  return in;
}

bool has_evidence(const StateVector& evidence) {
  return std::any_of(evidence.begin(), evidence.end(), [](int s) { return s != kUnobserved; });
}

}  // namespace

std::size_t Factor::offset(const StateVector& states) const {
  std::size_t pos = 0;
  for (std::size_t k = 0; k < scope.size(); ++k) {
    pos = pos * static_cast<std::size_t>(cards[k]) + static_cast<std::size_t>(states[scope[k]]);
  }
  return pos;
}

std::vector<int> Factor::states_at(std::size_t position) const {
  std::vector<int> states(scope.size(), 0);
  for (std::size_t k = scope.size(); k-- > 0;) {
    states[k] = static_cast<int>(position % static_cast<std::size_t>(cards[k]));
    position /= static_cast<std::size_t>(cards[k]);
  }
  return states;
}

Factor multiply(const Factor& lhs, const Factor& rhs) {
  Factor out;
  std::set_union(lhs.scope.begin(), lhs.scope.end(), rhs.scope.begin(), rhs.scope.end(),
                 std::back_inserter(out.scope));
  for (auto v : out.scope) {
    auto it = std::lower_bound(lhs.scope.begin(), lhs.scope.end(), v);
    if (it != lhs.scope.end() && *it == v) {
      out.cards.push_back(lhs.cards[static_cast<std::size_t>(it - lhs.scope.begin())]);
    } else {
      auto jt = std::lower_bound(rhs.scope.begin(), rhs.scope.end(), v);
      out.cards.push_back(rhs.cards[static_cast<std::size_t>(jt - rhs.scope.begin())]);
    }
  }
  out.values.resize(static_cast<Eigen::Index>(table_size(out.cards)));
  const auto sl = strides_in(lhs, out.scope);
  const auto sr = strides_in(rhs, out.scope);
  odometer<2>(out.cards, {&sl, &sr}, [&](std::size_t pos, const std::array<std::size_t, 2>& o) {
    out.values[static_cast<Eigen::Index>(pos)] =
        lhs.values[static_cast<Eigen::Index>(o[0])] * rhs.values[static_cast<Eigen::Index>(o[1])];
  });
  return out;
}

Factor sum_out(const Factor& f, std::size_t variable) {
  Factor out;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    if (f.scope[k] == variable) continue;
    out.scope.push_back(f.scope[k]);
    out.cards.push_back(f.cards[k]);
  }
  out.values = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(table_size(out.cards)));
  const auto so = strides_in(out, f.scope);
  odometer<1>(f.cards, {&so}, [&](std::size_t pos, const std::array<std::size_t, 1>& o) {
    out.values[static_cast<Eigen::Index>(o[0])] += f.values[static_cast<Eigen::Index>(pos)];
  });
  return out;
}

Factor reduce(const Factor& f, std::size_t variable, int state) {
  Factor out;
  std::size_t fixed_stride = 0;
  std::size_t stride = 1;
  std::vector<std::size_t> own(f.scope.size());
  for (std::size_t k = f.scope.size(); k-- > 0;) {
    own[k] = stride;
    stride *= static_cast<std::size_t>(f.cards[k]);
  }
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    if (f.scope[k] == variable) {
      fixed_stride = own[k];
      continue;
    }
    out.scope.push_back(f.scope[k]);
    out.cards.push_back(f.cards[k]);
  }
  out.values.resize(static_cast<Eigen::Index>(table_size(out.cards)));
  const auto sf = strides_in(f, out.scope);
  const std::size_t base = fixed_stride * static_cast<std::size_t>(state);
  odometer<1>(out.cards, {&sf}, [&](std::size_t pos, const std::array<std::size_t, 1>& o) {
    out.values[static_cast<Eigen::Index>(pos)] = f.values[static_cast<Eigen::Index>(base + o[0])];
  });
  return out;
}

Factor eliminate(const BayesianNetwork& bn, const StateVector& evidence,
                 std::span<const std::size_t> keep) {
  std::vector<std::size_t> seeds(keep.begin(), keep.end());
  for (std::size_t i = 0; i < bn.size(); ++i) {
    if (evidence[i] != kUnobserved) seeds.push_back(i);
  }
  const auto relevant = ancestral_closure(bn, seeds);

  std::vector<Factor> factors;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    if (!relevant[i]) continue;
    Factor f = cpt_factor(bn, i);
    const auto scope = f.scope;
    for (auto v : scope) {
      if (evidence[v] != kUnobserved) f = reduce(f, v, evidence[v]);
    }
    factors.push_back(std::move(f));
  }

  std::vector<bool> kept(bn.size(), false);
  for (auto v : keep) kept[v] = true;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    if (relevant[i] && !kept[i] && evidence[i] == kUnobserved) pending.push_back(i);
  }

  // Min-degree elimination: at each step remove the variable with the
  // fewest distinct neighbours in the current factor set.
  std::vector<int> mark(bn.size(), -1);
  int stamp = 0;
  while (!pending.empty()) {
    std::size_t best_pos = 0;
    std::size_t best_degree = std::numeric_limits<std::size_t>::max();
    for (std::size_t p = 0; p < pending.size(); ++p) {
      const std::size_t v = pending[p];
      ++stamp;
      std::size_t degree = 0;
      for (const auto& f : factors) {
        if (!std::binary_search(f.scope.begin(), f.scope.end(), v)) continue;
        for (auto u : f.scope) {
          if (u != v && mark[u] != stamp) {
            mark[u] = stamp;
            ++degree;
          }
        }
      }
      if (degree < best_degree) {
        best_degree = degree;
        best_pos = p;
      }
    }
    const std::size_t v = pending[best_pos];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));

    Factor product;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::binary_search(f.scope.begin(), f.scope.end(), v)) {
        product = multiply(product, f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(sum_out(product, v));
    factors = std::move(rest);
  }

  Factor result;
  for (const auto& f : factors) result = multiply(result, f);
  return result;
}

double probability_of_evidence(const BayesianNetwork& bn, const StateVector& evidence) {
  if (!has_evidence(evidence)) return 1.0;
  const double p = eliminate(bn, evidence, {}).values.sum();
  return p < kZeroProbability ? 0.0 : p;
}

double probability_of_evidence(const BayesianNetwork& bn, const Evidence& evidence) {
  return probability_of_evidence(bn, bn.to_states(evidence));
}

Factor posterior_joint(const BayesianNetwork& bn, const StateVector& evidence,
                       std::span<const std::size_t> query) {
  std::vector<std::size_t> free_query;
  for (auto q : query) {
    if (evidence[q] == kUnobserved) free_query.push_back(q);
  }
  std::sort(free_query.begin(), free_query.end());
  free_query.erase(std::unique(free_query.begin(), free_query.end()), free_query.end());

  Factor f = eliminate(bn, evidence, free_query);
  const double mass = f.values.sum();
  if (mass < kZeroProbability) throw ImpossibleEvidence("impossible evidence");
  f.values /= mass;
  f.values = (f.values < kZeroProbability).select(0.0, f.values);
  f.values /= f.values.sum();
  return f;
}

Eigen::VectorXd posterior_marginal(const BayesianNetwork& bn, const StateVector& evidence,
                                   std::size_t target) {
  const int card = bn.variable(target).cardinality();
  if (evidence[target] != kUnobserved) {
    if (probability_of_evidence(bn, evidence) == 0.0) {
      throw ImpossibleEvidence("impossible evidence");
    }
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(card);
    unit[evidence[target]] = 1.0;
    return unit;
  }
  const std::size_t query[] = {target};
  Factor f = posterior_joint(bn, evidence, query);
  return f.values.matrix();
}

Eigen::VectorXd posterior_marginal(const BayesianNetwork& bn, const Evidence& evidence,
                                   const std::string& target) {
  return posterior_marginal(bn, bn.to_states(evidence), bn.index_of(target));
}

Assignment sample_ancestral(const BayesianNetwork& bn, std::span<const std::size_t> order,
                            Rng& rng) {
  Assignment a(bn.size(), 0);
  for (auto i : order) {
    const auto& cpt = bn.variable(i).cpt;
    a[i] = sample_categorical(cpt.row(static_cast<Eigen::Index>(bn.row_of(i, a))), rng);
  }
  return a;
}

Assignment sample_assignment(const BayesianNetwork& bn, const StateVector& evidence, Rng& rng) {
  const auto order = topological_order(bn);
  if (!has_evidence(evidence)) return sample_ancestral(bn, order, rng);
  if (probability_of_evidence(bn, evidence) == 0.0) {
    throw ImpossibleEvidence("impossible evidence");
  }
  StateVector accumulated = evidence;
  for (auto i : order) {
    if (accumulated[i] != kUnobserved) continue;
    const Eigen::VectorXd marginal = posterior_marginal(bn, accumulated, i);
    accumulated[i] = sample_categorical(marginal, rng);
  }
  return accumulated;
}

Assignment sample_assignment(const BayesianNetwork& bn, const Evidence& evidence, Rng& rng) {
  return sample_assignment(bn, bn.to_states(evidence), rng);
}

}  // namespace popweave
