#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "invasion/dynamics.hpp"
#include "invasion/induced.hpp"

using namespace invasion;

TEST_CASE("kernel construction enforces the irreducibility condition") {
  CHECK_NOTHROW(InducedKernel(1, 3));
  CHECK_NOTHROW(InducedKernel(2, 2));
  CHECK_NOTHROW(InducedKernel(3, 7));
  CHECK_THROWS_AS(InducedKernel(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(InducedKernel(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(InducedKernel(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(InducedKernel(3, 2), std::invalid_argument);
}

TEST_CASE("hand-computed row on K_{2,3} at (1,1)") {
  const InducedKernel kernel(2, 3);
  const TransitionProbs p = kernel.transition_probs({1, 1});
  CHECK(p.up_k == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p.down_k == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p.up_l == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK(p.down_l == doctest::Approx(1.0 / 15.0).epsilon(1e-15));
  CHECK(p.stay == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("the inaccessible corner (m,0) pushes mass out, not into itself") {
  const InducedKernel kernel(2, 3);
  const auto p = kernel.transition_probs_exact({2, 0});
  CHECK(p[1] == Rational(3, 5));  // down_k
  CHECK(p[2] == Rational(2, 5));  // up_l
  CHECK(p[0] == Rational(0));
  CHECK(p[3] == Rational(0));
  CHECK(p[4] == Rational(0));  // never stays: every draw crosses the split
}

TEST_CASE("every row sums to exactly one in rational arithmetic") {
  for (const auto& [m, n] : {std::pair{1, 3}, {2, 3}, {3, 7}, {5, 9}}) {
    const InducedKernel kernel(m, n);
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n; ++l) {
        const auto p = kernel.transition_probs_exact({k, l});
        CHECK(p[0] + p[1] + p[2] + p[3] + p[4] == Rational(1));
      }
    }
  }
}

TEST_CASE("state classification") {
  const InducedKernel kernel(2, 3);
  CHECK(kernel.classify({0, 0}) == StateClass::absorbing);
  CHECK(kernel.classify({2, 3}) == StateClass::absorbing);
  CHECK(kernel.classify({0, 3}) == StateClass::inaccessible);
  CHECK(kernel.classify({2, 0}) == StateClass::inaccessible);
  CHECK(kernel.classify({1, 2}) == StateClass::transient);
  CHECK(kernel.is_absorbing({0, 0}));
  CHECK(!kernel.is_absorbing({1, 0}));
}

TEST_CASE("transient states come k-major with the four corners removed") {
  const std::vector<InducedState> s13 = transient_states(1, 3);
  CHECK(s13 == std::vector<InducedState>{{0, 1}, {0, 2}, {1, 1}, {1, 2}});
  CHECK(transient_states(2, 3).size() == 8);
  CHECK(transient_states(4, 20).size() == 101);
}

TEST_CASE("projection counts ones per side") {
  const Graph g = Graph::complete_bipartite(3, 4);
  OpinionConfig c = config_with_counts(g, 2, 1);
  CHECK(project(g, c) == InducedState{2, 1});
  c.set(6, 1);
  CHECK(project(g, c) == InducedState{2, 2});
}

TEST_CASE("sampled steps hit the four neighbours at the kernel frequencies") {
  const InducedKernel kernel(2, 3);
  const InducedState s{1, 1};
  const TransitionProbs p = kernel.transition_probs(s);
  Rng rng(31);
  const int draws = 200000;
  int up_k = 0, down_k = 0, up_l = 0, down_l = 0, stay = 0;
  for (int i = 0; i < draws; ++i) {
    const InducedState t = kernel.step(s, rng);
    if (t == InducedState{2, 1}) ++up_k;
    else if (t == InducedState{0, 1}) ++down_k;
    else if (t == InducedState{1, 2}) ++up_l;
    else if (t == InducedState{1, 0}) ++down_l;
    else if (t == s) ++stay;
    else FAIL("impossible transition");
  }
  const auto close_to = [&](int hits, double prob) {
    return std::abs(hits - draws * prob) < 4.0 * std::sqrt(draws * prob * (1.0 - prob));
  };
  CHECK(close_to(up_k, p.up_k));
  CHECK(close_to(down_k, p.down_k));
  CHECK(close_to(up_l, p.up_l));
  CHECK(close_to(down_l, p.down_l));
  CHECK(close_to(stay, p.stay));
}

TEST_CASE("aggregation is exactly lumpable against the full chain") {
  const LumpabilityReport r13 = lumpability_check(1, 3);
  CHECK(r13.lumpable);
  CHECK(r13.max_defect <= 1e-13);
  const LumpabilityReport r23 = lumpability_check(2, 3);
  CHECK(r23.lumpable);
  CHECK(r23.max_defect <= 1e-13);
}

TEST_CASE("the defect detects a corrupted kernel row") {
  const InducedKernel kernel(2, 3);
  const double defect = lumpability_defect(2, 3, [&](InducedState s) {
    TransitionProbs p = kernel.transition_probs(s);
    if (s.k == 1 && s.l == 1) {
      p.up_k += 1e-3;  // inject a bias
      p.stay -= 1e-3;
    }
    return p;
  });
  CHECK(defect >= 1e-3 * 0.5);
}

TEST_CASE("the exhaustive check refuses oversized chains") {
  CHECK_THROWS_AS(lumpability_check(10, 10, 1e-13, /*full_state_cap=*/1000), SizeCapError);
}

TEST_CASE("binomial configuration counts") {
  CHECK(binomial_weight(2, 3, {1, 1}) == u128{6});
  CHECK(binomial_weight(2, 3, {2, 3}) == u128{1});
  CHECK(binomial_weight(5, 5, {2, 3}) == u128{100});
  CHECK(u128_to_string(binomial_weight(2, 3, {1, 2})) == "6");
  CHECK(u128_to_string(u128{0}) == "0");
}
