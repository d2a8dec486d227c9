#include "popweave/netmetrics.hpp"

#include "popweave/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace popweave {

double distribution_error(const BayesianNetwork& bn, const Population& pop) {
  const auto tables = empirical_conditionals(bn, pop);
  double total = 0.0;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const auto& cpt = bn.variable(i).cpt;
    const auto& t = tables[i];
    double weighted = 0.0;
    double weight = 0.0;
    for (Eigen::Index r = 0; r < t.counts.size(); ++r) {
      if (!t.observed(r)) continue;
      const double gap = (t.frequencies.row(r) - cpt.row(r)).cwiseAbs().mean();
      weighted += t.counts[r] * gap;
      weight += t.counts[r];
    }
    if (weight > 0.0) total += weighted / weight;
  }
  return bn.size() == 0 ? 0.0 : total / static_cast<double>(bn.size());
}

std::vector<double> matching_error(const MatchingReport& report) {
  std::vector<double> rates;
  for (const auto& t : report.types) rates.push_back(t.error_rate());
  return rates;
}

std::vector<std::vector<AgentId>> undirected_projection(const SocialGraph& graph) {
  std::vector<std::vector<AgentId>> adj(graph.node_count());
  for (const auto& set : graph.links) {
    for (const auto& link : set.links()) {
      adj[link.a].push_back(link.b);
      adj[link.b].push_back(link.a);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

namespace {

DegreeSummary summarize(std::string type, const std::vector<std::size_t>& degrees) {
  DegreeSummary s;
  s.type = std::move(type);
  std::size_t max_degree = 0;
  std::size_t sum = 0;
  for (auto d : degrees) {
    max_degree = std::max(max_degree, d);
    sum += d;
  }
  s.histogram.assign(max_degree + 1, 0);
  for (auto d : degrees) ++s.histogram[d];
  s.mean = degrees.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(degrees.size());
  return s;
}

}  // namespace

GraphStats graph_stats(const SocialGraph& graph, std::size_t path_sample_k, Rng& rng) {
  const std::size_t n = graph.node_count();
  if (n < 2) throw Error("graph statistics need at least 2 agents (density undefined)");
  const auto adj = undirected_projection(graph);

  GraphStats stats;
  stats.nodes = n;
  std::size_t degree_sum = 0;
  for (const auto& list : adj) {
    degree_sum += list.size();
    const std::size_t d = list.size();
    if (d > 1) stats.connected_triples += d * (d - 1) / 2;
  }
  stats.edges = degree_sum / 2;
  stats.density = static_cast<double>(stats.edges) /
                  (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);

  // Ordered (v, u, w) with u, w both neighbours of v and u ~ w: 6 per triangle.
  std::vector<char> mark(n, 0);
  std::size_t closed = 0;
  for (std::size_t v = 0; v < n; ++v) {
    for (auto u : adj[v]) mark[u] = 1;
    for (auto u : adj[v]) {
      for (auto w : adj[u]) closed += mark[w];
    }
    for (auto u : adj[v]) mark[u] = 0;
  }
  stats.triangles = closed / 6;
  stats.transitivity = stats.connected_triples == 0
                           ? 0.0
                           : static_cast<double>(3 * stats.triangles) /
                                 static_cast<double>(stats.connected_triples);

  // Components; the largest one (lowest member id on ties) hosts path sampling.
  std::vector<std::size_t> component(n, static_cast<std::size_t>(-1));
  std::vector<std::vector<AgentId>> members;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] != static_cast<std::size_t>(-1)) continue;
    const std::size_t c = members.size();
    members.emplace_back();
    std::queue<AgentId> queue;
    queue.push(static_cast<AgentId>(s));
    component[s] = c;
    while (!queue.empty()) {
      AgentId v = queue.front();
      queue.pop();
      members[c].push_back(v);
      for (auto u : adj[v]) {
        if (component[u] == static_cast<std::size_t>(-1)) {
          component[u] = c;
          queue.push(u);
        }
      }
    }
  }
  std::size_t largest = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    stats.component_sizes.push_back(members[c].size());
    if (members[c].size() > members[largest].size()) largest = c;
  }
  std::sort(stats.component_sizes.rbegin(), stats.component_sizes.rend());

  std::vector<AgentId> sources = members[largest];
  std::sort(sources.begin(), sources.end());
  if (path_sample_k < sources.size()) {
    for (std::size_t i = 0; i < path_sample_k; ++i) {
      std::swap(sources[i], sources[i + uniform_index(rng, sources.size() - i)]);
    }
    sources.resize(path_sample_k);
  }
  stats.path_sources = sources.size();

  std::vector<std::uint32_t> dist(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<AgentId> frontier;
  std::uint64_t distance_sum = 0;
  std::uint64_t pairs = 0;
  for (auto s : sources) {
    std::fill(seen.begin(), seen.end(), 0);
    frontier.assign(1, s);
    seen[s] = 1;
    dist[s] = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const AgentId v = frontier[head];
      for (auto u : adj[v]) {
        if (seen[u]) continue;
        seen[u] = 1;
        dist[u] = dist[v] + 1;
        distance_sum += dist[u];
        ++pairs;
        frontier.push_back(u);
      }
    }
  }
  stats.avg_path_length =
      pairs == 0 ? 0.0 : static_cast<double>(distance_sum) / static_cast<double>(pairs);

  std::vector<std::size_t> degrees(n);
  for (std::size_t v = 0; v < n; ++v) degrees[v] = adj[v].size();
  stats.overall = summarize("all", degrees);
  for (std::size_t t = 0; t < graph.types.size(); ++t) {
    std::fill(degrees.begin(), degrees.end(), 0);
    for (const auto& link : graph.links[t].links()) {
      ++degrees[link.a];
      ++degrees[link.b];
    }
    stats.per_type.push_back(summarize(graph.types[t].name, degrees));
  }
  return stats;
}

std::vector<WeightedEdge> derive_interaction_network(const SocialGraph& graph,
                                                     const std::map<std::string, double>& weights) {
  for (const auto& [name, w] : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ConfigError("interaction weight for '" + name + "' outside [0, 1]");
    }
  }
  // Pair -> product of (1 - p_t) over the pair's types.
  std::map<std::pair<AgentId, AgentId>, double> miss;
  for (std::size_t t = 0; t < graph.types.size(); ++t) {
    auto it = weights.find(graph.types[t].name);
    const double p = it == weights.end() ? 0.0 : it->second;
    // A pair linked twice in one directed type still counts the type once.
    std::map<std::pair<AgentId, AgentId>, bool> seen;
    for (const auto& link : graph.links[t].links()) {
      const std::pair<AgentId, AgentId> pair{std::min(link.a, link.b), std::max(link.a, link.b)};
      if (!seen.emplace(pair, true).second) continue;
      auto [slot, inserted] = miss.try_emplace(pair, 1.0);
      slot->second *= 1.0 - p;
    }
  }
  std::vector<WeightedEdge> edges;
  for (const auto& [pair, m] : miss) {
    const double w = 1.0 - m;
    if (w > 0.0) edges.push_back({pair.first, pair.second, w});
  }
  return edges;
}

}  // namespace popweave
