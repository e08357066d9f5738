#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "invasion/graph.hpp"
#include "invasion/rational.hpp"
#include "invasion/rng.hpp"

namespace invasion {

class OpinionConfig;

// Aggregated state of a configuration on K_{m,n}: k = number of 1-opinions
// on the small side, l = number on the large side.  On the complete
// bipartite graph the dynamics seen through (k,l) is again Markov; that
// exact lumping is what lumpability_check certifies.
struct InducedState {
  int k = 0;
  int l = 0;
  friend auto operator<=>(const InducedState&, const InducedState&) = default;
};

enum class StateClass {
  transient,
  absorbing,     // the two consensus images (0,0) and (m,n)
  inaccessible,  // (0,n) and (m,0): legal count pairs no trajectory can enter
};

struct TransitionProbs {
  double up_k = 0.0;    // (k,l) -> (k+1,l)
  double down_k = 0.0;  // (k,l) -> (k-1,l)
  double up_l = 0.0;    // (k,l) -> (k,l+1)
  double down_l = 0.0;  // (k,l) -> (k,l-1)
  double stay = 0.0;
};

// One-step kernel of the aggregated invasion chain on K_{m,n}.
//
//   up_k   = l(m-k) / (m(n+m))      up_l   = k(n-l) / (n(n+m))
//   down_k = k(n-l) / (m(n+m))      down_l = l(m-k) / (n(n+m))
//   stay   = (kl + (m-k)(n-l)) / (nm)
//
// Probabilities are formed in exact rational arithmetic and emitted as
// doubles.  Construction enforces the irreducibility condition on the
// transient class: 2 <= m <= n, or m = 1 with n >= 3.
class InducedKernel {
 public:
  InducedKernel(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }

  StateClass classify(InducedState s) const;
  bool is_absorbing(InducedState s) const {
    return (s.k == 0 && s.l == 0) || (s.k == m_ && s.l == n_);
  }

  // order: up_k, down_k, up_l, down_l, stay
  std::array<Rational, 5> transition_probs_exact(InducedState s) const;
  TransitionProbs transition_probs(InducedState s) const;

  // one step; the categorical draw resolves in the fixed order
  // up_k, down_k, up_l, down_l, stay
  InducedState step(InducedState s, Rng& rng) const;

 private:
  void check_state(InducedState s) const;

  int m_;
  int n_;
};

// (k,l) image of a full configuration; requires the bipartite tag.
InducedState project(const Graph& graph, const OpinionConfig& config);

// Transient states in the canonical order: k major, l minor, with the two
// absorbing and the two inaccessible pairs skipped.  This order is the shared
// contract between the kernel CSV, the transition-matrix builder and every
// QSD vector in the library.
std::vector<InducedState> transient_states(int m, int n);

struct LumpabilityReport {
  double max_defect = 0.0;
  bool lumpable = false;  // max_defect <= tolerance
};

// Exhaustively enumerates one step of the full-configuration invasion chain
// on K_{m,n} (all 2^(m+n) configurations) and compares the probability mass
// entering each (k',l') block against the aggregated kernel row.
// full_state_cap bounds 2^(m+n).
LumpabilityReport lumpability_check(int m, int n, double tolerance = 1e-13,
                                    std::size_t full_state_cap = 5000);

// Same enumeration but scored against an arbitrary row provider; lets tests
// verify the defect actually detects a corrupted kernel.
double lumpability_defect(int m, int n,
                          const std::function<TransitionProbs(InducedState)>& rows,
                          std::size_t full_state_cap = 5000);

using u128 = unsigned __int128;

// C(m,k) * C(n,l): the number of full configurations aggregated into (k,l).
// Exact; throws std::overflow_error beyond 128 bits.
u128 binomial_weight(int m, int n, InducedState s);

std::string u128_to_string(u128 value);

}  // namespace invasion
