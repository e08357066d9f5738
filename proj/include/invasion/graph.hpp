#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "invasion/rng.hpp"

namespace invasion {

// Tag for complete bipartite graphs K_{m,n}.  The small side S occupies
// vertex ids [0, m) and the large side L occupies [m, m+n); keeping the
// small side first is relied on by projection and by tests.
struct BipartiteTag {
  int small_size = 0;  // m
  int large_size = 0;  // n
};

struct DirectedEdge {
  int from = -1;
  int to = -1;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Immutable undirected graph in CSR form, neighbor lists sorted.
// Construction validates: no loops, no duplicate edges, connected, >= 2 vertices.
class Graph {
 public:
  static Graph complete_bipartite(int m, int n);
  static Graph from_edges(int vertex_count,
                          std::span<const std::pair<int, int>> undirected_edges);

  int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
  int degree(int v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  bool adjacent(int v, int u) const;
  std::size_t directed_edge_count() const { return adjacency_.size(); }
  const std::optional<BipartiteTag>& bipartite() const { return tag_; }

 private:
  Graph(std::vector<std::size_t> offsets, std::vector<int> adjacency,
        std::optional<BipartiteTag> tag);

  std::vector<std::size_t> offsets_;  // vertex_count + 1
  std::vector<int> adjacency_;        // grouped by source, sorted within group
  std::optional<BipartiteTag> tag_;
};

// A probability distribution over the directed edges of a fixed graph.
// Each dynamics step draws one directed edge (v, u): v is the vertex whose
// opinion propagates, u the vertex that adopts it.  The table also exposes
// the marginal of the second coordinate and the conditional law of the first
// given the second, which drive the reverse (coalescing) flow.
class EdgeDistribution {
 public:
  // weights aligned with the canonical edge order: for v ascending, edges
  // (v, u) with u running over neighbors(v) in sorted order
  EdgeDistribution(const Graph& graph, std::span<const double> weights);

  int vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const DirectedEdge& edge(std::size_t i) const { return edges_[i]; }
  double weight_at(std::size_t i) const { return weights_[i]; }

  double weight(int v, int u) const;  // 0.0 when (v,u) is not an edge

  DirectedEdge sample(Rng& rng) const { return edges_[alias_.sample(rng)]; }

  // marginal probability that the second coordinate (the adopting vertex) is u
  double second_marginal(int u) const { return second_marginal_[u]; }

  // incoming picture of u: vertices v with (v,u) an edge, and rho(v | u)
  std::span<const int> sources(int u) const {
    return {in_sources_.data() + in_offsets_[u],
            in_sources_.data() + in_offsets_[u + 1]};
  }
  std::span<const double> conditional_given_second(int u) const {
    return {in_conditional_.data() + in_offsets_[u],
            in_conditional_.data() + in_offsets_[u + 1]};
  }

 private:
  int vertex_count_;
  std::vector<DirectedEdge> edges_;
  std::vector<double> weights_;
  std::vector<std::size_t> out_offsets_;  // edge index range per source vertex
  std::vector<std::size_t> in_offsets_;
  std::vector<int> in_sources_;
  std::vector<double> in_conditional_;
  std::vector<double> second_marginal_;
  AliasTable alias_;
};

// Invasion dynamics: pick v uniformly, then a uniform neighbor u of v, and
// u adopts v's opinion.  Weight of (v,u) is 1/(|V| deg(v)).
EdgeDistribution rho_invasion(const Graph& graph);

// Voter dynamics: pick u uniformly, then a uniform neighbor v of u, and u
// adopts v's opinion.  Exactly the transpose of the invasion weights.
EdgeDistribution rho_voter(const Graph& graph);

}  // namespace invasion
