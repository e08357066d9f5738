#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "invasion/graph.hpp"
#include "invasion/matrix.hpp"
#include "invasion/rational.hpp"
#include "invasion/rng.hpp"

namespace invasion {

// One coalescing trajectory per vertex, all driven by a common reverse flow:
// each reverse step draws the adopting vertex U from the second marginal of
// rho and a source V from rho(. | U), then every trajectory sitting at U
// hops to V.  Trajectories that meet never separate again.
class CoalescingSystem {
 public:
  explicit CoalescingSystem(int vertex_count);

  int vertex_count() const { return static_cast<int>(position_.size()); }
  int position(int start_vertex) const { return position_[start_vertex]; }
  std::uint64_t time() const { return time_; }
  int cluster_count() const;
  bool fully_coalesced() const { return cluster_count() == 1; }

  friend void reverse_step(CoalescingSystem& system, const EdgeDistribution& rho,
                           Rng& rng);

 private:
  std::vector<int> position_;  // position_[u] = current location of the chain started at u
  std::uint64_t time_ = 0;
};

void reverse_step(CoalescingSystem& system, const EdgeDistribution& rho, Rng& rng);

// Pathwise readback of one forward trajectory: with edge_log[t] the edge
// sampled at forward time t, returns the vertex whose time-0 opinion the
// query vertex holds at forward time horizon.  Exact, no sampling.
int duality_trace(std::span<const DirectedEdge> edge_log, int query_vertex,
                  std::size_t horizon);

// ---------------------------------------------------------------------------
// Two coalescing chains on K_{m,n} reduce to a 4-state chain on
// (both-large, both-small, split, coalesced).  Everything below works with
// the 3x3 substochastic block p on the first three states.

enum class PairState { both_large, both_small, split, coalesced };

// p: one-step matrix on (both_large, both_small, split) under the invasion
// reverse flow; pbar = (p - I) * (m+n) * n * m, an integer generator matrix.
// For m = 1 the both_small row is meaningless (a single small vertex cannot
// host two distinct chains); consumers drop state index 1 in that case.
struct PairMatrix {
  Matrix p;     // 3x3
  Matrix pbar;  // 3x3, integer entries
  int m = 0;
  int n = 0;
};

std::array<std::array<Rational, 3>, 3> pair_matrix_exact(int m, int n);
PairMatrix pair_matrix(int m, int n);

// Survival rate of the pair chain = spectral radius of p (2x2 reduction for
// m = 1), computed by power iteration.  This equals the spectral radius of
// the aggregated transition matrix restricted to transient states.
double lambda_cmc_numeric(int m, int n);

// m = 1 closed form, written against the conjugate to avoid cancellation:
//   lambda = 1 - 4 / (n [ (3+n^2) + sqrt((3+n^2)^2 - 8(n+1)) ])
double lambda_closed_m1(int n);

// Leading asymptotics 1 - 2m / ((m+n) n^2).
double lambda_asymptotic(int m, int n);

// Expected times to coalescence of the continuous-time chain with generator
// pbar, i.e. the solution of pbar f = -1:
//   f1 = f3 + 1/(2m^2),  f2 = f3 + 1/(2n^2),
//   f3 (m+n) = 1 + (n-1)n/(2m^2) + (m-1)m/(2n^2).
// Requires m >= 2 (for m = 1 the system degenerates with state 2 removed).
struct AbsorptionTimes {
  double f1 = 0.0;  // from both_large
  double f2 = 0.0;  // from both_small
  double f3 = 0.0;  // from split
};

AbsorptionTimes expected_absorption_times(int m, int n);

// Number of discrete pair-chain steps until coalescence from the given
// start; the mean from split is f3 * (m+n) * n * m.  The PairMatrix overload
// avoids rebuilding the matrix inside replication loops.
std::uint64_t sample_sigma(int m, int n, PairState start, Rng& rng);
std::uint64_t sample_sigma(const PairMatrix& pm, PairState start, Rng& rng);

}  // namespace invasion
