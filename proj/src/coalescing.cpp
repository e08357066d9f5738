#include "invasion/coalescing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "invasion/spectral.hpp"

namespace invasion {

CoalescingSystem::CoalescingSystem(int vertex_count) : position_(vertex_count) {
  if (vertex_count < 1) throw std::invalid_argument("CoalescingSystem: empty");
  std::iota(position_.begin(), position_.end(), 0);
}

int CoalescingSystem::cluster_count() const {
  std::vector<int> occupied = position_;
  std::sort(occupied.begin(), occupied.end());
  occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
  return static_cast<int>(occupied.size());
}

void reverse_step(CoalescingSystem& system, const EdgeDistribution& rho, Rng& rng) {
  if (rho.vertex_count() != system.vertex_count())
    throw std::invalid_argument("reverse_step: size mismatch");

  // U ~ second marginal of rho
  const double du = rng.uniform();
  int u = rho.vertex_count() - 1;
  double acc = 0.0;
  for (int v = 0; v < rho.vertex_count(); ++v) {
    acc += rho.second_marginal(v);
    if (du < acc) {
      u = v;
      break;
    }
  }
  // V ~ rho(. | U)
  const auto sources = rho.sources(u);
  const auto conditional = rho.conditional_given_second(u);
  const double dv = rng.uniform();
  int v = sources.back();
  acc = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    acc += conditional[i];
    if (dv < acc) {
      v = sources[i];
      break;
    }
  }

  for (int& pos : system.position_) {
    if (pos == u) pos = v;
  }
  ++system.time_;
}

int duality_trace(std::span<const DirectedEdge> edge_log, int query_vertex,
                  std::size_t horizon) {
  if (horizon > edge_log.size())
    throw std::invalid_argument("duality_trace: horizon exceeds recorded log");
  int pos = query_vertex;
  for (std::size_t s = 1; s <= horizon; ++s) {
    const DirectedEdge& e = edge_log[horizon - s];
    if (pos == e.to) pos = e.from;
  }
  return pos;
}

std::array<std::array<Rational, 3>, 3> pair_matrix_exact(int m, int n) {
  if (m < 1 || n < m) throw std::invalid_argument("pair_matrix: need 1 <= m <= n");
  const std::int64_t M = m, N = n;
  // second-marginal masses: rho2(small vertex) = n/((m+n)m),
  // rho2(large vertex) = m/((m+n)n)
  const Rational move_large(2 * M, (M + N) * N);      // both-large -> split
  const Rational move_small(2 * N, (M + N) * M);      // both-small -> split
  const Rational split_to_large(N - 1, (M + N) * M);  // both chains land large
  const Rational split_to_small(M - 1, (M + N) * N);
  const Rational split_exit = Rational(M * M + N * N) / Rational((M + N) * N * M);

  std::array<std::array<Rational, 3>, 3> p{};
  p[0] = {Rational(1) - move_large, Rational(0), move_large};
  p[1] = {Rational(0), Rational(1) - move_small, move_small};
  p[2] = {split_to_large, split_to_small, Rational(1) - split_exit};
  return p;
}

PairMatrix pair_matrix(int m, int n) {
  const auto exact = pair_matrix_exact(m, n);
  PairMatrix out;
  out.m = m;
  out.n = n;
  out.p = Matrix(3, 3);
  out.pbar = Matrix(3, 3);
  const Rational scale(static_cast<std::int64_t>(m + n) * n * m);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.p(i, j) = exact[i][j].to_double();
      // (p - I) * (m+n) n m reduces to an integer; keep it exact
      const Rational shifted = (exact[i][j] - Rational(i == j ? 1 : 0)) * scale;
      if (shifted.den() != 1) throw std::logic_error("pair_matrix: pbar not integral");
      out.pbar(i, j) = shifted.to_double();
    }
  }
  return out;
}

double lambda_cmc_numeric(int m, int n) {
  const PairMatrix pm = pair_matrix(m, n);
  if (m == 1) {
    // both_small is not a real state; drop row/column 1
    Matrix reduced(2, 2);
    reduced(0, 0) = pm.p(0, 0);
    reduced(0, 1) = pm.p(0, 2);
    reduced(1, 0) = pm.p(2, 0);
    reduced(1, 1) = pm.p(2, 2);
    return perron_left(reduced, 1e-14).lambda;
  }
  return perron_left(pm.p, 1e-14).lambda;
}

double lambda_closed_m1(int n) {
  if (n < 3) throw std::invalid_argument("lambda_closed_m1: need n >= 3");
  const double a = 3.0 + static_cast<double>(n) * n;
  const double disc = std::sqrt(a * a - 8.0 * (n + 1.0));
  return 1.0 - 4.0 / (static_cast<double>(n) * (a + disc));
}

double lambda_asymptotic(int m, int n) {
  return 1.0 - 2.0 * m / ((static_cast<double>(m) + n) * n * n);
}

AbsorptionTimes expected_absorption_times(int m, int n) {
  if (m < 2 || n < m)
    throw std::invalid_argument("expected_absorption_times: need 2 <= m <= n");
  const double dm = m, dn = n;
  AbsorptionTimes f;
  f.f3 = (1.0 + (dn - 1.0) * dn / (2.0 * dm * dm) + (dm - 1.0) * dm / (2.0 * dn * dn)) /
         (dm + dn);
  f.f1 = f.f3 + 1.0 / (2.0 * dm * dm);
  f.f2 = f.f3 + 1.0 / (2.0 * dn * dn);
  return f;
}

std::uint64_t sample_sigma(int m, int n, PairState start, Rng& rng) {
  if (start == PairState::both_small && m < 2)
    throw std::invalid_argument("sample_sigma: both_small needs m >= 2");
  return sample_sigma(pair_matrix(m, n), start, rng);
}

std::uint64_t sample_sigma(const PairMatrix& pm, PairState start, Rng& rng) {
  const int m = pm.m;
  const int n = pm.n;
  std::uint64_t t = 0;
  PairState state = start;
  while (state != PairState::coalesced) {
    ++t;
    const double u = rng.uniform();
    switch (state) {
      case PairState::both_large:
        if (u < pm.p(0, 2)) state = PairState::split;
        break;
      case PairState::both_small:
        if (u < pm.p(1, 2)) state = PairState::split;
        break;
      case PairState::split: {
        double acc = pm.p(2, 0);
        if (u < acc) {
          state = PairState::both_large;
          break;
        }
        acc += pm.p(2, 1);
        if (u < acc) {
          state = PairState::both_small;
          break;
        }
        acc += 1.0 / (static_cast<double>(m) * n);  // coalescence mass
        if (u < acc) state = PairState::coalesced;
        break;
      }
      case PairState::coalesced:
        break;
    }
  }
  return t;
}

}  // namespace invasion
