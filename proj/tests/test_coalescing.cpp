#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "invasion/coalescing.hpp"
#include "invasion/dynamics.hpp"
#include "invasion/errors.hpp"
#include "invasion/graph.hpp"
#include "invasion/matrix.hpp"
#include "invasion/rng.hpp"
#include "invasion/spectral.hpp"

using namespace invasion;

TEST_CASE("pair matrix on K_{2,3} matches hand-computed rationals") {
  const auto p = pair_matrix_exact(2, 3);
  CHECK(p[0][0] == Rational(11, 15));
  CHECK(p[0][1] == Rational(0));
  CHECK(p[0][2] == Rational(4, 15));
  CHECK(p[1][0] == Rational(0));
  CHECK(p[1][1] == Rational(2, 5));
  CHECK(p[1][2] == Rational(3, 5));
  CHECK(p[2][0] == Rational(1, 5));
  CHECK(p[2][1] == Rational(1, 15));
  CHECK(p[2][2] == Rational(17, 30));
}

TEST_CASE("only the split row leaks mass, and exactly 1/(mn) of it") {
  for (const auto& [m, n] : {std::pair{1, 3}, {2, 3}, {3, 7}, {5, 9}}) {
    CAPTURE(m);
    CAPTURE(n);
    const auto p = pair_matrix_exact(m, n);
    CHECK(p[0][0] + p[0][1] + p[0][2] == Rational(1));
    CHECK(p[1][0] + p[1][1] + p[1][2] == Rational(1));
    CHECK(p[2][0] + p[2][1] + p[2][2] ==
          Rational(1) - Rational(1, static_cast<std::int64_t>(m) * n));
  }
  CHECK_THROWS_AS(pair_matrix_exact(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(pair_matrix_exact(3, 2), std::invalid_argument);
}

TEST_CASE("the integer generator on K_{2,3} is exact") {
  const PairMatrix pm = pair_matrix(2, 3);
  const double want[3][3] = {{-8, 0, 8}, {0, -18, 18}, {6, 2, -13}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(pm.pbar(i, j) == want[i][j]);
      CHECK(pm.p(i, j) == doctest::Approx(pair_matrix_exact(2, 3)[i][j].to_double())
                              .epsilon(1e-16));
    }
}

TEST_CASE("pair-chain survival rate agrees with the dense spectrum of p") {
  const PairMatrix pm = pair_matrix(2, 3);
  const auto eigs = full_spectrum(pm.p);
  REQUIRE(eigs.size() == 3);
  CHECK(eigs[0].imag() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(lambda_cmc_numeric(2, 3) == doctest::Approx(eigs[0].real()).epsilon(1e-12));
}

TEST_CASE("K_{2,2} survival rate hits the quadratic closed form") {
  // eigenvector symmetry reduces the 3x3 to 2 lambda^2 - 2 lambda + 1/4 = 0
  CHECK(lambda_cmc_numeric(2, 2) ==
        doctest::Approx(0.5 + std::sqrt(2.0) / 4.0).epsilon(1e-13));
}

TEST_CASE("m = 1 closed form tracks the 2x2 numeric rate") {
  for (const int n : {3, 10, 100, 1000}) {
    CAPTURE(n);
    CHECK(lambda_closed_m1(n) == doctest::Approx(lambda_cmc_numeric(1, n)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lambda_closed_m1(2), std::invalid_argument);
}

TEST_CASE("the leading-order escape rate is within 5% at n = 100") {
  const double exact_escape = 1.0 - lambda_cmc_numeric(2, 100);
  const double asym_escape = 1.0 - lambda_asymptotic(2, 100);
  CHECK(exact_escape / asym_escape == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("closed-form absorption times solve pbar f = -1") {
  for (const auto& [m, n] : {std::pair{2, 3}, {3, 15}, {4, 20}}) {
    CAPTURE(m);
    CAPTURE(n);
    const PairMatrix pm = pair_matrix(m, n);
    const AbsorptionTimes f = expected_absorption_times(m, n);
    const std::vector<double> oracle =
        lu_solve(pm.pbar, std::vector<double>{-1.0, -1.0, -1.0});
    CHECK(f.f1 == doctest::Approx(oracle[0]).epsilon(1e-12));
    CHECK(f.f2 == doctest::Approx(oracle[1]).epsilon(1e-12));
    CHECK(f.f3 == doctest::Approx(oracle[2]).epsilon(1e-12));
    CHECK(f.f1 - f.f3 == doctest::Approx(1.0 / (2.0 * m * m)).epsilon(1e-13));
    CHECK(f.f2 - f.f3 == doctest::Approx(1.0 / (2.0 * n * n)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(expected_absorption_times(1, 5), std::invalid_argument);
}

TEST_CASE("sampled coalescence times reproduce the closed-form mean") {
  const PairMatrix pm = pair_matrix(2, 3);
  const AbsorptionTimes f = expected_absorption_times(2, 3);
  const double mean_steps = f.f3 * (2 + 3) * 3 * 2;  // 11.1666...
  Rng rng(99);
  CHECK(sample_sigma(pm, PairState::coalesced, rng) == 0);

  const std::uint64_t replicas = 20000;
  double acc = 0.0;
  for (std::uint64_t r = 0; r < replicas; ++r)
    acc += static_cast<double>(sample_sigma(pm, PairState::split, rng));
  const double empirical = acc / static_cast<double>(replicas);
  CHECK(std::abs(empirical - mean_steps) < 0.5);  // ~6 sigma at this budget

  Rng rng2(7);
  CHECK_THROWS_AS(sample_sigma(1, 5, PairState::both_small, rng2), std::invalid_argument);
}

TEST_CASE("reverse flow only merges clusters and eventually collapses them") {
  const Graph g = Graph::complete_bipartite(2, 3);
  const EdgeDistribution rho = rho_invasion(g);
  CoalescingSystem sys(g.vertex_count());
  CHECK(sys.cluster_count() == 5);
  CHECK_FALSE(sys.fully_coalesced());

  Rng rng(4);
  int prev = sys.cluster_count();
  std::uint64_t steps = 0;
  while (!sys.fully_coalesced() && steps < 100000) {
    // remember which trajectories have already met
    std::vector<std::pair<int, int>> merged;
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b)
        if (sys.position(a) == sys.position(b)) merged.emplace_back(a, b);

    reverse_step(sys, rho, rng);
    ++steps;

    const int now = sys.cluster_count();
    CHECK(now <= prev);
    prev = now;
    for (const auto& [a, b] : merged) CHECK(sys.position(a) == sys.position(b));
    for (int v = 0; v < 5; ++v) {
      CHECK(sys.position(v) >= 0);
      CHECK(sys.position(v) < 5);
    }
  }
  CHECK(sys.fully_coalesced());
  CHECK(sys.time() == steps);
}

TEST_CASE("tracing the edge log backwards recovers every opinion exactly") {
  const Graph g = Graph::complete_bipartite(2, 3);
  const EdgeDistribution rho = rho_invasion(g);
  const OpinionConfig initial = config_with_counts(g, 1, 2);

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Trajectory traj =
        run_to_consensus(g, rho, initial, seed, /*record_edges=*/true, /*max_steps=*/200);
    REQUIRE(traj.edge_log.size() == traj.steps);

    OpinionConfig config = initial;
    for (std::size_t t = 0; t <= traj.steps; ++t) {
      for (int u = 0; u < g.vertex_count(); ++u) {
        const int origin = duality_trace(traj.edge_log, u, t);
        REQUIRE(config[u] == initial[origin]);
      }
      if (t < traj.steps) config = step(g, config, traj.edge_log[t]);
    }
    if (!traj.censored) CHECK(config == traj.final_config);
  }
}

TEST_CASE("duality trace handles edge cases") {
  const std::vector<DirectedEdge> log{{0, 1}, {1, 2}};
  CHECK(duality_trace(log, 3, 0) == 3);
  CHECK(duality_trace(log, 2, 2) == 0);  // 2 <- 1 <- 0
  CHECK(duality_trace(log, 1, 1) == 0);
  CHECK_THROWS_AS(duality_trace(log, 0, 3), std::invalid_argument);
}
