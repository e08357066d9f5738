#include "invasion/estimators.hpp"

#include <cmath>
#include <cstddef>

namespace invasion {

std::vector<double> EmpiricalMeasure::probabilities(std::span<const InducedState> order) const {
  if (total_ == 0) throw std::invalid_argument("EmpiricalMeasure: empty measure");
  std::vector<double> p(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    p[i] = static_cast<double>(counts_[index(order[i])]) / static_cast<double>(total_);
  return p;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

RegressionReport regress_lambda(std::span<const double> tail, double trim_fraction) {
  if (tail.empty()) throw std::invalid_argument("regress_lambda: empty tail");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw std::invalid_argument("regress_lambda: trim_fraction must be in [0, 0.5)");
  const double base = tail[0];
  if (!(base > 0.0)) throw std::invalid_argument("regress_lambda: tail[0] must be positive");

  // the band is relative to the initial mass, so rescaling the whole curve
  // leaves the fit unchanged
  const double lo = trim_fraction * base;
  const double hi = (1.0 - trim_fraction) * base;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t kept = 0;
  std::uint64_t t_first = 0, t_last = 0;
  for (std::size_t t = 0; t < tail.size(); ++t) {
    if (!(tail[t] > lo && tail[t] < hi)) continue;
    const double x = static_cast<double>(t);
    const double y = std::log(tail[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (kept == 0) t_first = t;
    t_last = t;
    ++kept;
  }
  if (kept < 2)
    throw NonConvergenceError("regress_lambda: fewer than two points inside the trim band (" +
                              std::to_string(kept) + " kept)");

  const double denom = kept * sxx - sx * sx;
  if (!(denom > 0.0))
    throw NonConvergenceError("regress_lambda: degenerate time spread in the trim band");
  const double slope = (kept * sxy - sx * sy) / denom;
  if (!(slope < 0.0))
    throw NonConvergenceError("regress_lambda: fitted slope is not negative");

  RegressionReport r;
  r.slope = slope;
  r.intercept = (sy - slope * sx) / kept;
  r.lambda_hat = std::exp(slope);
  r.t_first = t_first;
  r.t_last = t_last;
  r.points_kept = kept;
  return r;
}

}  // namespace invasion
