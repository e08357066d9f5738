#include "invasion/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "invasion/errors.hpp"

namespace invasion {

namespace {

// strong connectivity of the positivity pattern: forward and backward
// reachability from node 0
bool pattern_strongly_connected(const Matrix& a) {
  const std::size_t n = a.rows();
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w) {
        const double entry = transpose ? a(w, v) : a(v, w);
        if (entry > 0.0 && !seen[w]) {
          seen[w] = 1;
          ++visited;
          stack.push_back(w);
        }
      }
    }
    return visited == n;
  };
  return reaches_all(false) && reaches_all(true);
}

// Householder similarity reduction to upper Hessenberg form, in place.
void hessenberg_reduce(Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> u(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm2 += a(i, k) * a(i, k);
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;

    const double x0 = a(k + 1, k);
    const double alpha = x0 >= 0.0 ? -norm : norm;
    double utu = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) u[i] = a(i, k);
    u[k + 1] -= alpha;
    for (std::size_t i = k + 1; i < n; ++i) utu += u[i] * u[i];
    if (utu == 0.0) continue;
    const double beta = 2.0 / utu;

    // left: rows k+1..n-1, columns k..n-1
    for (std::size_t j = k; j < n; ++j) {
      double c = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) c += u[i] * a(i, j);
      c *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= c * u[i];
    }
    // right: all rows, columns k+1..n-1
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) c += a(i, j) * u[j];
      c *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= c * u[j];
    }
    // the column is now (alpha, 0, ..., 0) up to roundoff; make it exact
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double magnitude, double carrier) {
  return carrier >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix (the classical
// EISPACK hqr scheme), eigenvalues only.
void hqr(Matrix& a, std::vector<double>& wr, std::vector<double>& wi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int n = static_cast<int>(a.rows());
  wr.assign(n, 0.0);
  wi.assign(n, 0.0);

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      l = 0;
      for (int i = nn; i >= 1; --i) {
        double s = std::abs(a(i - 1, i - 1)) + std::abs(a(i, i));
        if (s == 0.0) s = anorm;
        if (std::abs(a(i, i - 1)) <= eps * s) {
          a(i, i - 1) = 0.0;
          l = i;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        // one real eigenvalue deflated
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          // a 2x2 block: real pair or complex conjugates
          double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn] = z;
            wi[nn - 1] = -z;
          }
          nn -= 2;
        } else {
          if (its == 30)
            throw NonConvergenceError("full_spectrum: QR iteration stalled");
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;

          // look for two consecutive small subdiagonals to start the sweep
          double p = 0.0, q = 0.0, r = 0.0;
          int mstart = l;
          for (int mm = nn - 2; mm >= l; --mm) {
            const double z = a(mm, mm);
            const double rr = x - z;
            const double ss = y - z;
            p = (rr * ss - w) / a(mm + 1, mm) + a(mm, mm + 1);
            q = a(mm + 1, mm + 1) - z - rr - ss;
            r = a(mm + 2, mm + 1);
            const double scale = std::abs(p) + std::abs(q) + std::abs(r);
            p /= scale;
            q /= scale;
            r /= scale;
            mstart = mm;
            if (mm == l) break;
            const double u = std::abs(a(mm, mm - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(mm - 1, mm - 1)) + std::abs(z) +
                                            std::abs(a(mm + 1, mm + 1)));
            if (u <= eps * v) break;
          }
          for (int i = mstart + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != mstart + 2) a(i, i - 3) = 0.0;
          }

          // double QR sweep on rows l..nn, columns mstart..nn
          for (int k = mstart; k <= nn - 1; ++k) {
            if (k != mstart) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == mstart) {
              if (l != mstart) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            double z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              double pp = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                pp += r * a(k + 2, j);
                a(k + 2, j) -= pp * z;
              }
              a(k + 1, j) -= pp * y;
              a(k, j) -= pp * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              double pp = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                pp += z * a(i, k + 2);
                a(i, k + 2) -= pp * r;
              }
              a(i, k + 1) -= pp * q;
              a(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

}  // namespace

PerronResult perron_left(const Matrix& matrix, double tol, std::uint64_t max_iter) {
  const std::size_t n = matrix.rows();
  if (n == 0 || matrix.cols() != n)
    throw std::invalid_argument("perron_left: square nonempty matrix required");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(matrix(i, j) >= 0.0))
        throw std::invalid_argument("perron_left: entries must be nonnegative");

  // gather nonzeros once; each sweep is O(nnz)
  struct Triplet {
    std::uint32_t row, col;
    double value;
  };
  std::vector<Triplet> nonzeros;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (matrix(i, j) != 0.0)
        nonzeros.push_back({static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(j), matrix(i, j)});

  PerronResult result;
  result.irreducible_pattern = pattern_strongly_connected(matrix);

  std::vector<double> nu(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  for (std::uint64_t iter = 1; iter <= max_iter; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (const auto& e : nonzeros) next[e.col] += nu[e.row] * e.value;

    double lambda = 0.0;
    for (double v : next) lambda += v;
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      residual = std::max(residual, std::abs(next[j] - lambda * nu[j]));

    if (residual <= tol) {
      result.lambda = lambda;
      result.left_vector = nu;
      result.iterations = iter;
      result.residual = residual;
      return result;
    }
    if (!(lambda > 0.0))
      throw NonConvergenceError("perron_left: iterate vanished (nilpotent pattern?)");
    for (std::size_t j = 0; j < n; ++j) nu[j] = next[j] / lambda;
  }
  throw NonConvergenceError("perron_left: residual " + std::to_string(tol) +
                            " not reached within " + std::to_string(max_iter) +
                            " iterations");
}

std::vector<std::complex<double>> full_spectrum(const Matrix& matrix,
                                                std::size_t dim_cap) {
  const std::size_t n = matrix.rows();
  if (n == 0 || matrix.cols() != n)
    throw std::invalid_argument("full_spectrum: square nonempty matrix required");
  if (n > dim_cap)
    throw SizeCapError("full_spectrum: dimension " + std::to_string(n) +
                       " exceeds cap " + std::to_string(dim_cap));

  Matrix work = matrix;
  hessenberg_reduce(work);
  std::vector<double> wr, wi;
  hqr(work, wr, wi);

  std::vector<std::complex<double>> eigenvalues(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = {wr[i], wi[i]};
  std::sort(eigenvalues.begin(), eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return eigenvalues;
}

std::vector<double> expected_absorption_fundamental(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix a = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) -= s(i, j);
  return lu_solve(std::move(a), std::vector<double>(n, 1.0));
}

double spectrum_reflection_defect(std::span<const std::complex<double>> eigenvalues) {
  if (eigenvalues.empty()) return 0.0;
  std::vector<double> re(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) re[i] = eigenvalues[i].real();
  std::sort(re.begin(), re.end(), std::greater<>());
  const double mid = 0.5 * (re.front() + re.back());
  double defect = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i)
    defect = std::max(defect, std::abs(re[i] - (2.0 * mid - re[re.size() - 1 - i])));
  return defect;
}

SubstochasticMatrix build_S(int m, int n, std::size_t state_cap) {
  const InducedKernel kernel(m, n);
  std::vector<InducedState> states = transient_states(m, n);
  if (states.size() > state_cap)
    throw SizeCapError("build_S: " + std::to_string(states.size()) +
                       " transient states exceed cap " + std::to_string(state_cap));

  // grid position -> row index, -1 for the four excluded pairs
  std::vector<int> row_of(static_cast<std::size_t>(m + 1) * (n + 1), -1);
  for (std::size_t i = 0; i < states.size(); ++i)
    row_of[static_cast<std::size_t>(states[i].k) * (n + 1) + states[i].l] =
        static_cast<int>(i);

  Matrix entries(states.size(), states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const InducedState s = states[i];
    const TransitionProbs p = kernel.transition_probs(s);
    const std::pair<InducedState, double> moves[] = {
        {{s.k + 1, s.l}, p.up_k},
        {{s.k - 1, s.l}, p.down_k},
        {{s.k, s.l + 1}, p.up_l},
        {{s.k, s.l - 1}, p.down_l},
    };
    entries(i, i) = p.stay;
    for (const auto& [target, prob] : moves) {
      if (prob == 0.0) continue;
      switch (kernel.classify(target)) {
        case StateClass::transient:
          entries(i, row_of[static_cast<std::size_t>(target.k) * (n + 1) + target.l]) =
              prob;
          break;
        case StateClass::absorbing:
          break;  // mass dropped: this is what makes S substochastic
        case StateClass::inaccessible:
          throw std::logic_error("build_S: positive mass into an inaccessible state");
      }
    }
  }
  return {std::move(entries), std::move(states), m, n};
}

std::vector<double> grid_from_transient(std::span<const double> values, int m, int n) {
  const std::vector<InducedState> states = transient_states(m, n);
  if (values.size() != states.size())
    throw std::invalid_argument("grid_from_transient: length mismatch");
  std::vector<double> grid(static_cast<std::size_t>(m + 1) * (n + 1), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i)
    grid[static_cast<std::size_t>(states[i].k) * (n + 1) + states[i].l] = values[i];
  return grid;
}

}  // namespace invasion
