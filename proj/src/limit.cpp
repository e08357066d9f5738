#include "invasion/limit.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace invasion {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

double limit_joint_density(int m, int k, double x) {
  if (m < 1) throw std::invalid_argument("limit_joint_density: m >= 1 required");
  if (k < 0 || k > m) throw std::invalid_argument("limit_joint_density: k out of range");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("limit_joint_density: x outside [0,1]");
  return binom(m, k) * std::pow(x, k) * std::pow(1.0 - x, m - k);
}

std::vector<double> conditional_k_given_x(int m, double x) {
  if (m < 1) throw std::invalid_argument("conditional_k_given_x: m >= 1 required");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("conditional_k_given_x: x outside [0,1]");
  std::vector<double> pmf(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k)
    pmf[static_cast<std::size_t>(k)] = binom(m, k) * std::pow(x, k) * std::pow(1.0 - x, m - k);
  return pmf;
}

double conditional_x_given_k_pdf(int m, int k, double x) {
  return (m + 1) * limit_joint_density(m, k, x);
}

double beta_cdf_integer(int a, int b, double x) {
  if (a < 1 || b < 1) throw std::invalid_argument("beta_cdf_integer: need a, b >= 1");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const int nn = a + b - 1;
  double cdf = 0.0;
  for (int j = a; j <= nn; ++j)
    cdf += binom(nn, j) * std::pow(x, j) * std::pow(1.0 - x, nn - j);
  return cdf;
}

std::vector<double> discretized_limit(int m, int n) {
  const std::vector<InducedState> states = transient_states(m, n);
  std::vector<double> w(states.size());
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const int k = states[i].k;
    const int l = states[i].l;
    const double lo = l == 0 ? 0.0 : (l - 0.5) / n;
    const double hi = l == n ? 1.0 : (l + 0.5) / n;
    w[i] = (beta_cdf_integer(k + 1, m - k + 1, hi) - beta_cdf_integer(k + 1, m - k + 1, lo)) /
           (m + 1);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

LimitDiagnostics compare_to_limit(const std::vector<double>& nu, int m, int n) {
  const std::vector<InducedState> states = transient_states(m, n);
  if (nu.size() != states.size())
    throw std::invalid_argument("compare_to_limit: nu size does not match transient states");
  const std::vector<double> ref = discretized_limit(m, n);

  double nu_total = 0.0;
  for (double v : nu) nu_total += v;
  if (!(nu_total > 0.0)) throw std::invalid_argument("compare_to_limit: nu has no mass");

  const std::size_t cols = static_cast<std::size_t>(n) + 1;
  std::vector<double> marg_nu(cols, 0.0), marg_ref(cols, 0.0);
  std::vector<std::vector<double>> row_nu(static_cast<std::size_t>(m) + 1,
                                          std::vector<double>(cols, 0.0));
  std::vector<std::vector<double>> row_ref(static_cast<std::size_t>(m) + 1,
                                           std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::size_t k = static_cast<std::size_t>(states[i].k);
    const std::size_t l = static_cast<std::size_t>(states[i].l);
    const double p = nu[i] / nu_total;
    marg_nu[l] += p;
    marg_ref[l] += ref[i];
    row_nu[k][l] += p;
    row_ref[k][l] += ref[i];
  }

  LimitDiagnostics out;

  double cum_nu = 0.0, cum_ref = 0.0;
  for (std::size_t l = 0; l < cols; ++l) {
    cum_nu += marg_nu[l];
    cum_ref += marg_ref[l];
    out.ks_marginal = std::max(out.ks_marginal, std::abs(cum_nu - cum_ref));
  }

  out.ks_beta.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    double mass_nu = 0.0, mass_ref = 0.0;
    for (std::size_t l = 0; l < cols; ++l) {
      mass_nu += row_nu[static_cast<std::size_t>(k)][l];
      mass_ref += row_ref[static_cast<std::size_t>(k)][l];
    }
    double& ks = out.ks_beta[static_cast<std::size_t>(k)];
    if (!(mass_nu > 0.0)) {
      ks = 1.0;  // degenerate input: flag loudly
    } else {
      double ca = 0.0, cb = 0.0;
      for (std::size_t l = 0; l < cols; ++l) {
        ca += row_nu[static_cast<std::size_t>(k)][l] / mass_nu;
        cb += row_ref[static_cast<std::size_t>(k)][l] / mass_ref;
        ks = std::max(ks, std::abs(ca - cb));
      }
    }
    out.max_ks_beta = std::max(out.max_ks_beta, ks);
  }

  // deciles of x = l/n; conditional k-law inside each against
  // Binomial(m, xbar) at the nu-weighted decile mean
  out.tv_binomial.assign(10, 0.0);
  for (int b = 0; b < 10; ++b) {
    std::vector<double> pk(static_cast<std::size_t>(m) + 1, 0.0);
    double mass = 0.0, xsum = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const int l = states[i].l;
      const int bin = std::min(9, 10 * l / n);
      if (bin != b) continue;
      const double p = nu[i] / nu_total;
      pk[static_cast<std::size_t>(states[i].k)] += p;
      mass += p;
      xsum += p * l / n;
    }
    if (!(mass > 0.0)) continue;  // no atoms or no mass in this decile
    const std::vector<double> bino = conditional_k_given_x(m, xsum / mass);
    double tv = 0.0;
    for (int k = 0; k <= m; ++k)
      tv += std::abs(pk[static_cast<std::size_t>(k)] / mass - bino[static_cast<std::size_t>(k)]);
    out.tv_binomial[static_cast<std::size_t>(b)] = 0.5 * tv;
    out.max_tv_binomial = std::max(out.max_tv_binomial, 0.5 * tv);
  }
  return out;
}

SLDecomposition sl_decompose(const std::vector<double>& nu, double lambda, int m, int n) {
  const std::vector<InducedState> states = transient_states(m, n);
  if (nu.size() != states.size())
    throw std::invalid_argument("sl_decompose: nu size does not match transient states");

  const std::size_t cols = static_cast<std::size_t>(n) + 1;
  std::vector<double> full(static_cast<std::size_t>(m + 1) * cols, 0.0);
  for (std::size_t i = 0; i < states.size(); ++i)
    full[static_cast<std::size_t>(states[i].k) * cols + states[i].l] = nu[i];
  const auto at = [&](int k, int l) -> double {
    if (k < 0 || k > m || l < 0 || l > n) return 0.0;
    return full[static_cast<std::size_t>(k) * cols + l];
  };

  SLDecomposition out;
  out.m = m;
  out.n = n;
  out.lambda = lambda;
  out.S.assign(static_cast<std::size_t>(m + 1) * cols, 0.0);
  out.L.assign(static_cast<std::size_t>(m + 1) * cols, 0.0);
  out.D.assign(static_cast<std::size_t>(m + 2) * cols, 0.0);

  const double denom_k = static_cast<double>(m + n) * m;
  const double denom_l = static_cast<double>(m + n) * n;
  for (int k = 0; k <= m + 1; ++k)
    for (int l = 0; l <= n; ++l)
      out.D[static_cast<std::size_t>(k) * cols + l] =
          (at(k - 1, l) * l * (m - k + 1) - at(k, l) * (n - l) * k) / denom_k;

  for (int k = 0; k <= m; ++k) {
    for (int l = 0; l <= n; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k) * cols + l;
      out.S[idx] = out.D[idx] - out.D[idx + cols];
      out.L[idx] = (k * (at(k, l - 1) * (n - l + 1) - at(k, l) * (n - l)) +
                    (m - k) * (at(k, l + 1) * (l + 1) - at(k, l) * l)) /
                   denom_l;
      const bool delta = (k == 0 && l == 0) || (k == m && l == n);
      const double rhs = out.S[idx] + out.L[idx] + (delta ? 0.5 * (lambda - 1.0) : 0.0);
      out.max_residual = std::max(out.max_residual, std::abs((lambda - 1.0) * at(k, l) - rhs));
    }
  }

  for (int l = 0; l <= n; ++l) {
    double s = 0.0;
    for (int k = 0; k <= m; ++k) s += out.s_at(k, l);
    out.max_col_sum_S = std::max(out.max_col_sum_S, std::abs(s));
  }
  for (int k = 0; k <= m; ++k) {
    double s = 0.0;
    for (int l = 0; l <= n; ++l) s += out.l_at(k, l);
    out.max_row_sum_L = std::max(out.max_row_sum_L, std::abs(s));
  }
  out.corner_gap_S = std::abs(out.s_at(m, n) - out.s_at(0, 0));
  out.corner_gap_L = std::abs(out.l_at(m, n) - out.l_at(0, 0));
  return out;
}

SteinResult stein_check_uniform(const std::function<double(double)>& f,
                                const std::function<double(double)>& fpp) {
  const auto g = [&](double x) { return x * (1.0 - x) * fpp(x) + 2.0 * f(x); };
  constexpr int kCells = 10000;  // composite Simpson, fixed for reproducibility
  const double h = 1.0 / kCells;
  double sum = g(0.0) + g(1.0);
  for (int i = 1; i < kCells; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * g(i * h);
  SteinResult r;
  r.lhs = sum * h / 3.0;
  r.rhs = f(0.0) + f(1.0);
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

SteinResult stein_check_discrete(const std::function<double(double)>& f,
                                 const std::function<double(double)>& fpp,
                                 const std::vector<std::pair<double, double>>& atoms) {
  SteinResult r;
  for (const auto& [x, w] : atoms) r.lhs += w * (x * (1.0 - x) * fpp(x) + 2.0 * f(x));
  r.rhs = f(0.0) + f(1.0);
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

namespace detail {

double ode_v1(double t) { return t * t - 1.0; }

double ode_v2(double t) {
  const double s = std::abs(t);
  double val;
  if (s >= 1.0) {
    val = 2.0 * s;  // (t^2-1) ln((1-t)/(1+t)) -> 0
  } else if (s > 1.0 - 1e-6) {
    const double u = 1.0 - s;  // keep the u ln u product accurate
    val = 2.0 * s - u * (2.0 - u) * (std::log(u) - std::log(2.0 - u));
  } else {
    val = 2.0 * s + (s * s - 1.0) * std::log((1.0 - s) / (1.0 + s));
  }
  return t < 0.0 ? -val : val;
}

}  // namespace detail

OdeSolution solve_ode(std::function<double(double)> F, double support_lo, double support_hi,
                      int cells) {
  if (!(support_lo > 0.0 && support_hi < 1.0 && support_lo < support_hi))
    throw std::invalid_argument("solve_ode: support must lie strictly inside (0,1)");
  if (cells < 2) throw std::invalid_argument("solve_ode: need at least 2 cells");

  OdeSolution sol;
  sol.F_ = std::move(F);
  sol.ta_ = 2.0 * support_lo - 1.0;
  sol.tb_ = 2.0 * support_hi - 1.0;
  sol.h_ = (sol.tb_ - sol.ta_) / cells;
  sol.c1_.assign(static_cast<std::size_t>(cells) + 1, 0.0);
  sol.c2_.assign(static_cast<std::size_t>(cells) + 1, 0.0);

  const auto G = [&](double t) { return sol.F_((1.0 + t) / 2.0); };
  const auto d1 = [&](double t) { return detail::ode_v2(t) * G(t) / (4.0 * (1.0 - t * t)); };
  const auto d2 = [&](double t) { return G(t) / 4.0; };

  for (int i = 0; i < cells; ++i) {
    const double a = sol.ta_ + i * sol.h_;
    const double b = a + sol.h_;
    const double mid = 0.5 * (a + b);
    sol.c1_[static_cast<std::size_t>(i) + 1] =
        sol.c1_[static_cast<std::size_t>(i)] + sol.h_ / 6.0 * (d1(a) + 4.0 * d1(mid) + d1(b));
    sol.c2_[static_cast<std::size_t>(i) + 1] =
        sol.c2_[static_cast<std::size_t>(i)] + sol.h_ / 6.0 * (d2(a) + 4.0 * d2(mid) + d2(b));
  }

  sol.c1_anchor_ = sol.c1_at_t(0.0);
  sol.c2_anchor_ = sol.c2_at_t(0.0);
  return sol;
}

double OdeSolution::c1_at_t(double t) const {
  if (t <= ta_) return 0.0 - c1_anchor_;
  if (t >= tb_) return c1_.back() - c1_anchor_;
  const double p = (t - ta_) / h_;
  std::size_t i = static_cast<std::size_t>(p);
  if (i >= c1_.size() - 1) i = c1_.size() - 2;
  const double frac = p - static_cast<double>(i);
  return c1_[i] + frac * (c1_[i + 1] - c1_[i]) - c1_anchor_;
}

double OdeSolution::c2_at_t(double t) const {
  if (t <= ta_) return 0.0 - c2_anchor_;
  if (t >= tb_) return c2_.back() - c2_anchor_;
  const double p = (t - ta_) / h_;
  std::size_t i = static_cast<std::size_t>(p);
  if (i >= c2_.size() - 1) i = c2_.size() - 2;
  const double frac = p - static_cast<double>(i);
  return c2_[i] + frac * (c2_[i + 1] - c2_[i]) - c2_anchor_;
}

double OdeSolution::value(double x) const {
  const double t = 2.0 * std::min(1.0, std::max(0.0, x)) - 1.0;
  return c1_at_t(t) * detail::ode_v1(t) + c2_at_t(t) * detail::ode_v2(t);
}

double OdeSolution::second_derivative(double x) const {
  if (!(x > 0.0 && x < 1.0))
    throw std::domain_error("OdeSolution::second_derivative: open interval only");
  const double t = 2.0 * x - 1.0;
  const double one_mt2 = 1.0 - t * t;
  const double log_ratio = std::log((1.0 - t) / (1.0 + t));
  const double vpp = F_(x) / one_mt2 + 2.0 * c1_at_t(t) +
                     c2_at_t(t) * (2.0 * log_ratio - 4.0 * t / one_mt2);
  return 4.0 * vpp;
}

double OdeSolution::residual(double x) const {
  const double w = x * (1.0 - x);
  // at the endpoints x(1-x) f'' -> -2 f, so the left side collapses to 0
  if (w <= 1e-12) return std::abs(F_(x));
  return std::abs(w * second_derivative(x) + 2.0 * value(x) - F_(x));
}

double taylor_identity_gap(const std::vector<double>& nu, double lambda, int m, int n,
                           const std::function<double(double)>& f,
                           const std::function<double(double)>& fp,
                           const std::function<double(double)>& fpp) {
  const std::vector<InducedState> states = transient_states(m, n);
  if (nu.size() != states.size())
    throw std::invalid_argument("taylor_identity_gap: nu size does not match transient states");
  double int_f = 0.0, int_fp = 0.0, int_fpp = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double k = states[i].k;
    const double x = static_cast<double>(states[i].l) / n;
    int_f += nu[i] * f(x);
    int_fp += nu[i] * (k * (1.0 - x) - (m - k) * x) * fp(x);
    int_fpp += nu[i] * (k * (1.0 - x) + (m - k) * x) * fpp(x);
  }
  const double lhs = (lambda - 1.0) * int_f;
  const double rhs = int_fp / (static_cast<double>(m + n) * n) +
                     int_fpp / (2.0 * static_cast<double>(m + n) * n * n) +
                     0.5 * (lambda - 1.0) * (f(0.0) + f(1.0));
  return std::abs(lhs - rhs);
}

}  // namespace invasion
