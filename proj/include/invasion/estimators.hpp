#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "invasion/errors.hpp"
#include "invasion/induced.hpp"
#include "invasion/rng.hpp"

namespace invasion {

// Occupation counts over the (k,l) grid of a fixed K_{m,n}.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(int m, int n)
      : m_(m), n_(n), counts_(static_cast<std::size_t>(m + 1) * (n + 1), 0) {}

  int m() const { return m_; }
  int n() const { return n_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(InducedState s) const { return counts_[index(s)]; }

  void add(InducedState s, std::uint64_t c = 1) {
    counts_[index(s)] += c;
    total_ += c;
  }

  // normalized probabilities in the given state order
  std::vector<double> probabilities(std::span<const InducedState> order) const;

 private:
  std::size_t index(InducedState s) const {
    return static_cast<std::size_t>(s.k) * (n_ + 1) + s.l;
  }

  int m_;
  int n_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// (1/2) sum |p_i - q_i| for aligned probability vectors
double total_variation(std::span<const double> p, std::span<const double> q);

// Survival curve from replicated absorption times.
// survivors[t] counts replicas with tau > t, for t = 0..horizon.
struct TailEstimate {
  std::vector<std::uint64_t> survivors;
  std::uint64_t replicas = 0;

  std::vector<double> probabilities() const {
    std::vector<double> p(survivors.size());
    for (std::size_t t = 0; t < survivors.size(); ++t)
      p[t] = static_cast<double>(survivors[t]) / static_cast<double>(replicas);
    return p;
  }
};

// Least-squares fit of log survival against time over the central band of the
// absorption-time sample.
struct RegressionReport {
  double slope = 0.0;      // of ln P(tau > t) vs t
  double intercept = 0.0;  // fitted value at t = 0
  double lambda_hat = 0.0; // exp(slope)
  std::uint64_t t_first = 0;
  std::uint64_t t_last = 0;
  std::size_t points_kept = 0;
};

// Keeps the t with tail[t] strictly inside (trim, 1-trim) relative to the
// initial mass tail[0], i.e. drops the lowest and highest trim-quantiles of
// the absorption-time sample, then fits ln tail[t] = intercept + slope * t
// by unweighted least squares.  Throws NonConvergenceError with fewer than
// two usable points, or if the fitted slope is not negative.
RegressionReport regress_lambda(std::span<const double> tail, double trim_fraction = 1e-3);

namespace detail {

// Replicated absorption-time sampling, optionally split across threads.
// simulate(seed) must return min(tau, horizon+1) for one replica; replica r
// uses seed base_seed + r, so results are identical for any thread count.
template <typename Simulate>
TailEstimate tail_from_replicas(Simulate simulate, std::uint64_t horizon,
                                std::uint64_t replicas, std::uint64_t base_seed,
                                int threads) {
  if (replicas == 0) throw std::invalid_argument("tail estimate: zero replicas");
  if (threads < 1) threads = 1;

  // bucket counts of min(tau, horizon+1); index horizon+1 = censored
  std::vector<std::vector<std::uint64_t>> buckets(
      threads, std::vector<std::uint64_t>(horizon + 2, 0));
  auto worker = [&](int ti) {
    for (std::uint64_t r = ti; r < replicas; r += static_cast<std::uint64_t>(threads)) {
      const std::uint64_t tau = simulate(base_seed + r);
      ++buckets[ti][tau <= horizon ? tau : horizon + 1];
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int ti = 0; ti < threads; ++ti) pool.emplace_back(worker, ti);
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> absorbed_by(horizon + 2, 0);
  for (const auto& b : buckets)
    for (std::size_t t = 0; t < b.size(); ++t) absorbed_by[t] += b[t];

  TailEstimate out;
  out.replicas = replicas;
  out.survivors.assign(horizon + 1, 0);
  std::uint64_t absorbed = 0;
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    absorbed += absorbed_by[t];
    out.survivors[t] = replicas - absorbed;
  }
  return out;
}

}  // namespace detail

// Chain is anything exposing m(), n(), step(InducedState, Rng&) and
// is_absorbing(InducedState); the aggregated kernel is the production chain,
// tests inject synthetic ones.

// Single long run that, on any step that would enter a consensus state,
// instead restarts from the empirical occupation measure accumulated so far
// (the proportion of time spent at each state, counted from time 0).  The
// returned measure keeps only the visits after burn_in; the restart
// distribution always uses the full history.
template <typename Chain>
EmpiricalMeasure estimate_qsd_restart(const Chain& chain, InducedState initial,
                                      std::uint64_t total_steps, std::uint64_t burn_in,
                                      std::uint64_t seed) {
  if (chain.is_absorbing(initial))
    throw std::invalid_argument("estimate_qsd_restart: initial state is absorbing");
  if (total_steps <= burn_in)
    throw std::invalid_argument("estimate_qsd_restart: total_steps must exceed burn_in");

  const int n = chain.n();
  const std::size_t grid = static_cast<std::size_t>(chain.m() + 1) * (n + 1);
  std::vector<std::uint64_t> occupation(grid, 0);  // full history, drives restarts
  std::vector<std::uint64_t> at_burn_in;
  const auto index = [n](InducedState s) {
    return static_cast<std::size_t>(s.k) * (n + 1) + s.l;
  };

  Rng rng(seed);
  InducedState state = initial;
  occupation[index(state)] += 1;
  std::uint64_t occupied = 1;
  if (burn_in == 0) at_burn_in.assign(grid, 0);

  std::vector<std::uint64_t> cumulative(grid, 0);
  for (std::uint64_t t = 1; t <= total_steps; ++t) {
    InducedState next = chain.step(state, rng);
    if (chain.is_absorbing(next)) {
      // restart from the occupation measure: cumulative counts + binary search
      std::uint64_t run = 0;
      for (std::size_t i = 0; i < grid; ++i) {
        run += occupation[i];
        cumulative[i] = run;
      }
      const std::uint64_t target = rng.below(occupied) + 1;
      const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
      const std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
      next = InducedState{static_cast<int>(i / (n + 1)), static_cast<int>(i % (n + 1))};
    }
    state = next;
    occupation[index(state)] += 1;
    ++occupied;
    if (t == burn_in) at_burn_in = occupation;
  }

  EmpiricalMeasure measure(chain.m(), chain.n());
  for (std::size_t i = 0; i < grid; ++i) {
    const std::uint64_t kept = occupation[i] - (at_burn_in.empty() ? 0 : at_burn_in[i]);
    if (kept > 0)
      measure.add(InducedState{static_cast<int>(i / (n + 1)), static_cast<int>(i % (n + 1))},
                  kept);
  }
  return measure;
}

// Conditional-on-survival estimator: run independent replicas for t_star
// steps and keep the states of those still unabsorbed.
template <typename Chain>
EmpiricalMeasure estimate_qsd_conditional(const Chain& chain, InducedState initial,
                                          std::uint64_t t_star, std::uint64_t replicas,
                                          std::uint64_t seed, int threads = 1) {
  if (chain.is_absorbing(initial))
    throw std::invalid_argument("estimate_qsd_conditional: initial state is absorbing");
  if (replicas == 0) throw std::invalid_argument("estimate_qsd_conditional: zero replicas");
  if (threads < 1) threads = 1;

  const int n = chain.n();
  const std::size_t grid = static_cast<std::size_t>(chain.m() + 1) * (n + 1);
  std::vector<std::vector<std::uint64_t>> counts(threads,
                                                 std::vector<std::uint64_t>(grid, 0));
  auto worker = [&](int ti) {
    for (std::uint64_t r = ti; r < replicas; r += static_cast<std::uint64_t>(threads)) {
      Rng rng(seed + r);
      InducedState state = initial;
      bool absorbed = false;
      for (std::uint64_t t = 0; t < t_star; ++t) {
        state = chain.step(state, rng);
        if (chain.is_absorbing(state)) {
          absorbed = true;
          break;
        }
      }
      if (!absorbed) ++counts[ti][static_cast<std::size_t>(state.k) * (n + 1) + state.l];
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int ti = 0; ti < threads; ++ti) pool.emplace_back(worker, ti);
    for (auto& th : pool) th.join();
  }

  EmpiricalMeasure measure(chain.m(), chain.n());
  for (int ti = 0; ti < threads; ++ti) {
    for (std::size_t i = 0; i < grid; ++i) {
      if (counts[ti][i] > 0)
        measure.add(InducedState{static_cast<int>(i / (n + 1)), static_cast<int>(i % (n + 1))},
                    counts[ti][i]);
    }
  }
  if (measure.total() == 0)
    throw NonConvergenceError("estimate_qsd_conditional: no survivors at t_star (0 of " +
                              std::to_string(replicas) + " replicas)");
  return measure;
}

// Survival curve of the absorption time for a replicated chain run.
template <typename Chain>
TailEstimate survival_tail_chain(const Chain& chain, InducedState initial,
                                 std::uint64_t horizon, std::uint64_t replicas,
                                 std::uint64_t seed, int threads = 1) {
  return detail::tail_from_replicas(
      [&](std::uint64_t replica_seed) -> std::uint64_t {
        Rng rng(replica_seed);
        InducedState state = initial;
        if (chain.is_absorbing(state)) return 0;
        for (std::uint64_t t = 1; t <= horizon; ++t) {
          state = chain.step(state, rng);
          if (chain.is_absorbing(state)) return t;
        }
        return horizon + 1;
      },
      horizon, replicas, seed, threads);
}

}  // namespace invasion
