#include "invasion/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace invasion {

namespace {

void check_connected(const std::vector<std::size_t>& offsets,
                     const std::vector<int>& adjacency) {
  const int n = static_cast<int>(offsets.size()) - 1;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (std::size_t i = offsets[v]; i < offsets[v + 1]; ++i) {
      const int u = adjacency[i];
      if (!seen[u]) {
        seen[u] = 1;
        ++visited;
        frontier.push(u);
      }
    }
  }
  if (visited != n) throw std::invalid_argument("Graph: not connected");
}

}  // namespace

Graph::Graph(std::vector<std::size_t> offsets, std::vector<int> adjacency,
             std::optional<BipartiteTag> tag)
    : offsets_(std::move(offsets)), adjacency_(std::move(adjacency)), tag_(tag) {
  if (vertex_count() < 2) throw std::invalid_argument("Graph: needs at least 2 vertices");
  check_connected(offsets_, adjacency_);
}

Graph Graph::complete_bipartite(int m, int n) {
  if (m < 1 || n < m) throw std::invalid_argument("complete_bipartite: need 1 <= m <= n");
  std::vector<std::size_t> offsets(m + n + 1, 0);
  std::vector<int> adjacency;
  adjacency.reserve(static_cast<std::size_t>(2) * m * n);
  for (int s = 0; s < m; ++s) {
    for (int l = 0; l < n; ++l) adjacency.push_back(m + l);
    offsets[s + 1] = adjacency.size();
  }
  for (int l = 0; l < n; ++l) {
    for (int s = 0; s < m; ++s) adjacency.push_back(s);
    offsets[m + l + 1] = adjacency.size();
  }
  return Graph(std::move(offsets), std::move(adjacency), BipartiteTag{m, n});
}

Graph Graph::from_edges(int vertex_count,
                        std::span<const std::pair<int, int>> undirected_edges) {
  if (vertex_count < 2) throw std::invalid_argument("Graph: needs at least 2 vertices");
  std::vector<std::vector<int>> adj(vertex_count);
  for (const auto& [a, b] : undirected_edges) {
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
      throw std::invalid_argument("Graph: edge endpoint out of range");
    if (a == b) throw std::invalid_argument("Graph: self loop");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> offsets(vertex_count + 1, 0);
  std::vector<int> adjacency;
  for (int v = 0; v < vertex_count; ++v) {
    auto& nb = adj[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      throw std::invalid_argument("Graph: duplicate edge");
    adjacency.insert(adjacency.end(), nb.begin(), nb.end());
    offsets[v + 1] = adjacency.size();
  }
  return Graph(std::move(offsets), std::move(adjacency), std::nullopt);
}

bool Graph::adjacent(int v, int u) const {
  const auto nb = neighbors(v);
  return std::binary_search(nb.begin(), nb.end(), u);
}

EdgeDistribution::EdgeDistribution(const Graph& graph, std::span<const double> weights)
    : vertex_count_(graph.vertex_count()),
      weights_(weights.begin(), weights.end()),
      alias_(weights) {
  if (weights.size() != graph.directed_edge_count())
    throw std::invalid_argument("EdgeDistribution: weight count != directed edge count");

  edges_.reserve(weights.size());
  out_offsets_.assign(vertex_count_ + 1, 0);
  double total = 0.0;
  for (int v = 0; v < vertex_count_; ++v) {
    for (int u : graph.neighbors(v)) edges_.push_back({v, u});
    out_offsets_[v + 1] = edges_.size();
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!(weights_[i] > 0.0) || weights_[i] > 1.0)
      throw std::invalid_argument("EdgeDistribution: weights must lie in (0,1] with full support");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("EdgeDistribution: weights must sum to 1");

  second_marginal_.assign(vertex_count_, 0.0);
  std::vector<std::size_t> in_degree(vertex_count_, 0);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    second_marginal_[edges_[i].to] += weights_[i];
    ++in_degree[edges_[i].to];
  }
  in_offsets_.assign(vertex_count_ + 1, 0);
  for (int u = 0; u < vertex_count_; ++u) in_offsets_[u + 1] = in_offsets_[u] + in_degree[u];
  in_sources_.assign(edges_.size(), -1);
  in_conditional_.assign(edges_.size(), 0.0);
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto [v, u] = edges_[i];
    in_sources_[cursor[u]] = v;
    in_conditional_[cursor[u]] = weights_[i] / second_marginal_[u];
    ++cursor[u];
  }
}

double EdgeDistribution::weight(int v, int u) const {
  for (std::size_t i = out_offsets_[v]; i < out_offsets_[v + 1]; ++i) {
    if (edges_[i].to == u) return weights_[i];
  }
  return 0.0;
}

EdgeDistribution rho_invasion(const Graph& graph) {
  const double inv_v = 1.0 / graph.vertex_count();
  std::vector<double> weights;
  weights.reserve(graph.directed_edge_count());
  for (int v = 0; v < graph.vertex_count(); ++v) {
    const double w = inv_v / graph.degree(v);
    for (int i = 0; i < graph.degree(v); ++i) weights.push_back(w);
  }
  return EdgeDistribution(graph, weights);
}

EdgeDistribution rho_voter(const Graph& graph) {
  // voter weight of (v,u) = invasion weight of (u,v) = 1/(|V| deg(u))
  const double inv_v = 1.0 / graph.vertex_count();
  std::vector<double> weights;
  weights.reserve(graph.directed_edge_count());
  for (int v = 0; v < graph.vertex_count(); ++v) {
    for (int u : graph.neighbors(v)) weights.push_back(inv_v / graph.degree(u));
  }
  return EdgeDistribution(graph, weights);
}

}  // namespace invasion
