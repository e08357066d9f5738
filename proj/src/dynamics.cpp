#include "invasion/dynamics.hpp"

#include <stdexcept>
#include <utility>

namespace invasion {

OpinionConfig OpinionConfig::all(int vertex_count, int opinion) {
  if (opinion != 0 && opinion != 1)
    throw std::invalid_argument("OpinionConfig: opinions are 0/1");
  return OpinionConfig(std::vector<std::uint8_t>(vertex_count,
                                                 static_cast<std::uint8_t>(opinion)));
}

OpinionConfig::OpinionConfig(std::vector<std::uint8_t> opinions)
    : opinions_(std::move(opinions)) {
  for (std::uint8_t o : opinions_) {
    if (o > 1) throw std::invalid_argument("OpinionConfig: opinions are 0/1");
    ones_ += o;
  }
}

OpinionConfig config_with_counts(const Graph& graph, int k, int l) {
  const auto& tag = graph.bipartite();
  if (!tag) throw std::invalid_argument("config_with_counts: graph has no bipartite tag");
  if (k < 0 || k > tag->small_size || l < 0 || l > tag->large_size)
    throw std::invalid_argument("config_with_counts: counts out of range");
  std::vector<std::uint8_t> opinions(tag->small_size + tag->large_size, 0);
  for (int v = 0; v < k; ++v) opinions[v] = 1;
  for (int v = 0; v < l; ++v) opinions[tag->small_size + v] = 1;
  return OpinionConfig(std::move(opinions));
}

OpinionConfig step(const Graph& graph, OpinionConfig config, DirectedEdge e) {
  if (config.size() != graph.vertex_count())
    throw std::invalid_argument("step: configuration size mismatch");
  if (!graph.adjacent(e.from, e.to)) throw std::invalid_argument("step: not an edge");
  config.set(e.to, config[e.from]);
  return config;
}

Trajectory run_to_consensus(const Graph& graph, const EdgeDistribution& rho,
                            OpinionConfig initial, std::uint64_t seed,
                            bool record_edges, std::uint64_t max_steps) {
  if (initial.size() != graph.vertex_count() ||
      rho.vertex_count() != graph.vertex_count())
    throw std::invalid_argument("run_to_consensus: size mismatch");

  Trajectory out;
  out.final_config = std::move(initial);
  if (out.final_config.is_consensus()) return out;

  Rng rng(seed);
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    const DirectedEdge e = rho.sample(rng);
    out.final_config.set(e.to, out.final_config[e.from]);
    if (record_edges) out.edge_log.push_back(e);
    if (out.final_config.is_consensus()) {
      out.steps = t;
      return out;
    }
  }
  out.steps = max_steps;
  out.censored = true;
  return out;
}

TailEstimate survival_tail(const Graph& graph, const EdgeDistribution& rho,
                           const OpinionConfig& initial, std::uint64_t horizon,
                           std::uint64_t replicas, std::uint64_t seed, int threads) {
  if (initial.size() != graph.vertex_count() ||
      rho.vertex_count() != graph.vertex_count())
    throw std::invalid_argument("survival_tail: size mismatch");

  return detail::tail_from_replicas(
      [&](std::uint64_t replica_seed) -> std::uint64_t {
        Rng rng(replica_seed);
        OpinionConfig config = initial;
        if (config.is_consensus()) return 0;
        for (std::uint64_t t = 1; t <= horizon; ++t) {
          const DirectedEdge e = rho.sample(rng);
          config.set(e.to, config[e.from]);
          if (config.is_consensus()) return t;
        }
        return horizon + 1;
      },
      horizon, replicas, seed, threads);
}

}  // namespace invasion
