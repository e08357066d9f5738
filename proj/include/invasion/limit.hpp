#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "invasion/induced.hpp"

namespace invasion {

// Limiting law of (k, l/n) as n grows with m fixed.  Joint density on
// {0..m} x [0,1] is C(m,k) x^k (1-x)^{m-k}; both marginals are uniform;
// k | x ~ Binomial(m, x) and x | k ~ Beta(k+1, m-k+1).

// C(m,k) x^k (1-x)^{m-k}.  Sums to 1 over k at fixed x, integrates to
// 1/(m+1) over x at fixed k.
double limit_joint_density(int m, int k, double x);

// pmf of Binomial(m, x), length m+1
std::vector<double> conditional_k_given_x(int m, double x);

// Beta(k+1, m-k+1) density: (m+1) C(m,k) x^k (1-x)^{m-k}
double conditional_x_given_k_pdf(int m, int k, double x);

// CDF of Beta(a, b) for integer a, b >= 1 through the binomial tail sum
//   P(X <= x) = sum_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^{a+b-1-j},
// which is exact up to rounding (no incomplete-beta quadrature needed).
double beta_cdf_integer(int a, int b, double x);

struct LimitDensity {
  int m = 1;
  double joint(int k, double x) const { return limit_joint_density(m, k, x); }
  std::vector<double> k_given_x(double x) const { return conditional_k_given_x(m, x); }
  double x_given_k(int k, double x) const { return conditional_x_given_k_pdf(m, k, x); }
};

// Distances between a quasistationary vector (indexed by transient_states
// order) and the limit law.  The reference measure is the limit law
// discretized onto the same atoms: each atom (k, l) receives the Beta mass
// of the cell [(l-1/2)/n, (l+1/2)/n] around l/n, the four boundary atoms
// that the chain excludes are dropped, and the rest is renormalized.
// Comparing against this discretization (rather than the continuous CDF)
// makes the self-comparison distance vanish, while still detecting the
// O(1/n) finite-size deviation of an actual quasistationary vector.
//
// ks_*: sup over atoms of the cumulative-mass difference in l.
// tv_binomial: per decile of x = l/n, total-variation distance between the
// conditional k-law and Binomial(m, xbar) at the weighted decile mean xbar.
struct LimitDiagnostics {
  double ks_marginal = 0.0;
  std::vector<double> ks_beta;      // indexed by k = 0..m
  std::vector<double> tv_binomial;  // indexed by decile 0..9
  double max_ks_beta = 0.0;
  double max_tv_binomial = 0.0;
};

LimitDiagnostics compare_to_limit(const std::vector<double>& nu, int m, int n);

// Reference weights used by compare_to_limit (exposed for tests): limit law
// discretized to the transient atoms, renormalized; same indexing as nu.
std::vector<double> discretized_limit(int m, int n);

// Splits the eigen-identity of a quasistationary pair (nu, lambda) into a
// k-direction flow difference S and an l-direction flow term L:
//   D(k,l) = (nu(k-1,l) l (m-k+1) - nu(k,l) (n-l) k) / ((m+n) m)
//   S(k,l) = D(k,l) - D(k+1,l)
//   L(k,l) = (k (nu(k,l-1)(n-l+1) - nu(k,l)(n-l))
//             + (m-k)(nu(k,l+1)(l+1) - nu(k,l) l)) / ((m+n) n)
// with nu extended by zero outside the grid.  On the full grid
//   (lambda-1) nu(k,l) = S(k,l) + L(k,l) + ((lambda-1)/2) 1_Delta(k,l),
// where Delta = {(0,0), (m,n)}; the Delta term uses the symmetric split of
// the escape mass, which the unique quasistationary vector satisfies.
struct SLDecomposition {
  int m = 0;
  int n = 0;
  double lambda = 0.0;
  std::vector<double> S;  // (m+1) x (n+1) row-major in k
  std::vector<double> L;  // (m+1) x (n+1)
  std::vector<double> D;  // (m+2) x (n+1), k = 0..m+1
  double max_residual = 0.0;   // of the eigen-identity above, over the grid
  double max_col_sum_S = 0.0;  // max over l of |Sum_k S(k,l)|  (telescoping)
  double max_row_sum_L = 0.0;  // max over k of |Sum_l L(k,l)|
  double corner_gap_S = 0.0;   // |S(m,n) - S(0,0)|
  double corner_gap_L = 0.0;   // |L(m,n) - L(0,0)|

  double s_at(int k, int l) const { return S[static_cast<std::size_t>(k) * (n + 1) + l]; }
  double l_at(int k, int l) const { return L[static_cast<std::size_t>(k) * (n + 1) + l]; }
  double d_at(int k, int l) const { return D[static_cast<std::size_t>(k) * (n + 1) + l]; }
};

SLDecomposition sl_decompose(const std::vector<double>& nu, double lambda, int m, int n);

// Integral identity of the uniform second marginal:
//   integral of x(1-x) f''(x) + 2 f(x) over [0,1]  =  f(0) + f(1).
// The uniform variant integrates with composite Simpson on a fixed grid of
// 10^4 cells; the discrete variant sums over weighted atoms (x, w).
struct SteinResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

SteinResult stein_check_uniform(const std::function<double(double)>& f,
                                const std::function<double(double)>& fpp);
SteinResult stein_check_discrete(const std::function<double(double)>& f,
                                 const std::function<double(double)>& fpp,
                                 const std::vector<std::pair<double, double>>& atoms);

namespace detail {
// Homogeneous solutions of (1-t^2) v'' + 2 v = 0 on [-1, 1]:
//   v1(t) = t^2 - 1
//   v2(t) = 2t + (t^2 - 1) ln((1-t)/(1+t)),
// with v2 extended continuously to v2(+-1) = +-2 (the log term vanishes in
// the limit; near the endpoints it is evaluated through u = 1 - |t| to keep
// u ln u accurate).
double ode_v1(double t);
double ode_v2(double t);
}  // namespace detail

// Bounded continuous solution of  x(1-x) f''(x) + 2 f(x) = F(x)  for F
// supported inside [lo, hi], 0 < lo <= hi < 1.  Change of variables
// t = 2x - 1 turns this into (1-t^2) v'' + 2 v = G(t), solved by variation
// of parameters around v1, v2 (Wronskian constant -4):
//   c1'(t) = v2(t) G(t) / (4 (1-t^2)),   c2'(t) = G(t) / 4,
// both anchored so that c1 = c2 = 0 at t = 0 (or at the support edge
// nearest 0 when 0 lies outside the support).  The coefficient integrals
// are accumulated per-cell with Simpson's rule on a fixed grid over the
// support and interpolated linearly between cell edges.
class OdeSolution {
 public:
  double value(double x) const;  // f(x)

  // f''(x) = 4 [ G/(1-t^2) + 2 c1 + c2 (2 ln((1-t)/(1+t)) - 4t/(1-t^2)) ].
  // Diverges at x = 0, 1 whenever c2 does not vanish there; only valid on
  // the open interval.
  double second_derivative(double x) const;

  // |x(1-x) f''(x) + 2 f(x) - F(x)|; at the endpoints the product
  // x(1-x) f'' has the finite limit -2 f, which is used directly.
  double residual(double x) const;

  double c1_at_t(double t) const;
  double c2_at_t(double t) const;

 private:
  friend OdeSolution solve_ode(std::function<double(double)> F, double lo, double hi,
                               int cells);
  std::function<double(double)> F_;
  double ta_ = 0.0;  // support in t
  double tb_ = 0.0;
  double h_ = 0.0;
  std::vector<double> c1_;  // cumulative from ta at cell edges
  std::vector<double> c2_;
  double c1_anchor_ = 0.0;  // value subtracted so c(0) = 0
  double c2_anchor_ = 0.0;
};

OdeSolution solve_ode(std::function<double(double)> F, double support_lo, double support_hi,
                      int cells = 8192);

// Residual of the discrete Taylor-expansion identity for a quasistationary
// pair (nu, lambda) and a smooth f with derivatives fp, fpp:
//   (lambda-1) Int f  =  (1/((m+n)n))   Int (k(1-x) - (m-k)x) f'(x)
//                      + (1/(2(m+n)n^2)) Int (k(1-x) + (m-k)x) f''(x)
//                      + ((lambda-1)/2) (f(0) + f(1))  +  O(n^-3),
// where Int h = sum over transient (k,l) of nu(k,l) h(k, l/n).  Returns the
// absolute gap; gap * n^3 stays bounded as n grows at fixed m.
double taylor_identity_gap(const std::vector<double>& nu, double lambda, int m, int n,
                           const std::function<double(double)>& f,
                           const std::function<double(double)>& fp,
                           const std::function<double(double)>& fpp);

}  // namespace invasion
