#pragma once

#include <cstdint>
#include <vector>

#include "invasion/estimators.hpp"
#include "invasion/graph.hpp"
#include "invasion/rng.hpp"

namespace invasion {

// A 0/1 opinion per vertex.  Tracks the number of ones so consensus checks
// in the simulation loop are O(1).
class OpinionConfig {
 public:
  static OpinionConfig all(int vertex_count, int opinion);
  explicit OpinionConfig(std::vector<std::uint8_t> opinions);

  int size() const { return static_cast<int>(opinions_.size()); }
  int operator[](int v) const { return opinions_[v]; }
  int count_ones() const { return ones_; }
  bool is_consensus() const { return ones_ == 0 || ones_ == size(); }

  void set(int v, int value) {
    ones_ += value - opinions_[v];
    opinions_[v] = static_cast<std::uint8_t>(value);
  }

  friend bool operator==(const OpinionConfig&, const OpinionConfig&) = default;

 private:
  std::vector<std::uint8_t> opinions_;
  int ones_ = 0;
};

// Configuration on a tagged K_{m,n} with the first k small-side and first l
// large-side vertices holding opinion 1.
OpinionConfig config_with_counts(const Graph& graph, int k, int l);

// One update along the directed edge (v,u): u adopts v's current opinion.
OpinionConfig step(const Graph& graph, OpinionConfig config, DirectedEdge e);

struct Trajectory {
  std::uint64_t steps = 0;  // absorption time, or max_steps if censored
  bool censored = false;
  OpinionConfig final_config{std::vector<std::uint8_t>{0, 0}};
  std::vector<DirectedEdge> edge_log;  // length == steps when recorded
};

// Runs the chain until consensus, counting every sampled edge (including
// steps that change nothing).  Stops with censored = true at max_steps.
Trajectory run_to_consensus(const Graph& graph, const EdgeDistribution& rho,
                            OpinionConfig initial, std::uint64_t seed,
                            bool record_edges = false,
                            std::uint64_t max_steps = 1'000'000'000ULL);

// Empirical survival curve of the consensus time over independent replicas;
// replica r is seeded with seed + r.
TailEstimate survival_tail(const Graph& graph, const EdgeDistribution& rho,
                           const OpinionConfig& initial, std::uint64_t horizon,
                           std::uint64_t replicas, std::uint64_t seed,
                           int threads = 1);

}  // namespace invasion
