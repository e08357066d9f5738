#include "invasion/induced.hpp"

#include <algorithm>
#include <stdexcept>

#include "invasion/dynamics.hpp"
#include "invasion/errors.hpp"

namespace invasion {

InducedKernel::InducedKernel(int m, int n) : m_(m), n_(n) {
  const bool ok = (m >= 2 && n >= m) || (m == 1 && n >= 3);
  if (!ok)
    throw std::invalid_argument(
        "InducedKernel: transient class is irreducible only for 2 <= m <= n "
        "or m = 1, n >= 3");
}

void InducedKernel::check_state(InducedState s) const {
  if (s.k < 0 || s.k > m_ || s.l < 0 || s.l > n_)
    throw std::invalid_argument("InducedKernel: state out of range");
}

StateClass InducedKernel::classify(InducedState s) const {
  check_state(s);
  if (is_absorbing(s)) return StateClass::absorbing;
  if ((s.k == 0 && s.l == n_) || (s.k == m_ && s.l == 0))
    return StateClass::inaccessible;
  return StateClass::transient;
}

std::array<Rational, 5> InducedKernel::transition_probs_exact(InducedState s) const {
  check_state(s);
  const std::int64_t m = m_, n = n_, k = s.k, l = s.l;
  const Rational up_k(l * (m - k), m * (n + m));
  const Rational down_k(k * (n - l), m * (n + m));
  const Rational up_l(k * (n - l), n * (n + m));
  const Rational down_l(l * (m - k), n * (n + m));
  const Rational stay(k * l + (m - k) * (n - l), n * m);
  return {up_k, down_k, up_l, down_l, stay};
}

TransitionProbs InducedKernel::transition_probs(InducedState s) const {
  const auto exact = transition_probs_exact(s);
  return {exact[0].to_double(), exact[1].to_double(), exact[2].to_double(),
          exact[3].to_double(), exact[4].to_double()};
}

InducedState InducedKernel::step(InducedState s, Rng& rng) const {
  const TransitionProbs p = transition_probs(s);
  const double u = rng.uniform();
  double acc = p.up_k;
  if (u < acc) return {s.k + 1, s.l};
  acc += p.down_k;
  if (u < acc) return {s.k - 1, s.l};
  acc += p.up_l;
  if (u < acc) return {s.k, s.l + 1};
  acc += p.down_l;
  if (u < acc) return {s.k, s.l - 1};
  return s;
}

InducedState project(const Graph& graph, const OpinionConfig& config) {
  const auto& tag = graph.bipartite();
  if (!tag) throw std::invalid_argument("project: graph has no bipartite tag");
  if (config.size() != graph.vertex_count())
    throw std::invalid_argument("project: configuration size mismatch");
  InducedState s;
  for (int v = 0; v < tag->small_size; ++v) s.k += config[v];
  for (int v = tag->small_size; v < config.size(); ++v) s.l += config[v];
  return s;
}

std::vector<InducedState> transient_states(int m, int n) {
  std::vector<InducedState> states;
  states.reserve(static_cast<std::size_t>(m + 1) * (n + 1));
  for (int k = 0; k <= m; ++k) {
    for (int l = 0; l <= n; ++l) {
      const bool absorbing = (k == 0 && l == 0) || (k == m && l == n);
      const bool inaccessible = (k == 0 && l == n) || (k == m && l == 0);
      if (!absorbing && !inaccessible) states.push_back({k, l});
    }
  }
  return states;
}

double lumpability_defect(int m, int n,
                          const std::function<TransitionProbs(InducedState)>& rows,
                          std::size_t full_state_cap) {
  if (m + n >= 40 || (std::size_t{1} << (m + n)) > full_state_cap)
    throw SizeCapError("lumpability: 2^(m+n) exceeds the full-state cap");

  const Graph graph = Graph::complete_bipartite(m, n);
  const EdgeDistribution rho = rho_invasion(graph);
  const int vertices = m + n;
  const std::size_t configs = std::size_t{1} << vertices;

  double worst = 0.0;
  std::vector<double> block_mass(static_cast<std::size_t>(m + 1) * (n + 1));
  for (std::size_t bits = 0; bits < configs; ++bits) {
    std::vector<std::uint8_t> opinions(vertices);
    for (int v = 0; v < vertices; ++v) opinions[v] = (bits >> v) & 1u;
    const OpinionConfig config{opinions};
    const InducedState from = project(graph, config);

    std::fill(block_mass.begin(), block_mass.end(), 0.0);
    for (std::size_t i = 0; i < rho.edge_count(); ++i) {
      const OpinionConfig next = step(graph, config, rho.edge(i));
      const InducedState to = project(graph, next);
      block_mass[static_cast<std::size_t>(to.k) * (n + 1) + to.l] += rho.weight_at(i);
    }

    const TransitionProbs expected = rows(from);
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n; ++l) {
        double want = 0.0;
        if (k == from.k + 1 && l == from.l) want = expected.up_k;
        else if (k == from.k - 1 && l == from.l) want = expected.down_k;
        else if (k == from.k && l == from.l + 1) want = expected.up_l;
        else if (k == from.k && l == from.l - 1) want = expected.down_l;
        else if (k == from.k && l == from.l) want = expected.stay;
        const double got = block_mass[static_cast<std::size_t>(k) * (n + 1) + l];
        worst = std::max(worst, std::abs(got - want));
      }
    }
  }
  return worst;
}

LumpabilityReport lumpability_check(int m, int n, double tolerance,
                                    std::size_t full_state_cap) {
  const InducedKernel kernel(m, n);
  const double defect = lumpability_defect(
      m, n, [&](InducedState s) { return kernel.transition_probs(s); }, full_state_cap);
  return {defect, defect <= tolerance};
}

u128 binomial_weight(int m, int n, InducedState s) {
  if (s.k < 0 || s.k > m || s.l < 0 || s.l > n)
    throw std::invalid_argument("binomial_weight: state out of range");
  constexpr u128 max128 = ~u128{0};
  const auto choose = [&](int total, int pick) -> u128 {
    pick = std::min(pick, total - pick);
    u128 r = 1;
    for (int i = 1; i <= pick; ++i) {
      const u128 factor = static_cast<u128>(total - pick + i);
      if (r > max128 / factor) throw std::overflow_error("binomial_weight: exceeds 128 bits");
      r = r * factor / static_cast<u128>(i);
    }
    return r;
  };
  const u128 a = choose(m, s.k);
  const u128 b = choose(n, s.l);
  if (b != 0 && a > max128 / b) throw std::overflow_error("binomial_weight: exceeds 128 bits");
  return a * b;
}

std::string u128_to_string(u128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

}  // namespace invasion
