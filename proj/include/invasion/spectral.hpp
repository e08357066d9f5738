#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "invasion/induced.hpp"
#include "invasion/matrix.hpp"

namespace invasion {

struct PerronResult {
  double lambda = 0.0;               // spectral radius estimate
  std::vector<double> left_vector;   // nonnegative, sums to 1
  std::uint64_t iterations = 0;
  double residual = 0.0;             // max-norm of (nu S - lambda nu) at return
  bool irreducible_pattern = false;  // positive pattern strongly connected
};

// Left power iteration from the uniform vector with L1 renormalization each
// sweep; stops when the max-norm eigen-residual drops below tol.  Nonzero
// entries are gathered once so each sweep costs O(nnz).  Throws
// NonConvergenceError at max_iter.
PerronResult perron_left(const Matrix& matrix, double tol = 1e-13,
                         std::uint64_t max_iter = 10'000'000ULL);

// All eigenvalues via Householder reduction to Hessenberg form followed by
// the implicitly-shifted (Francis double-shift) QR iteration, both in-repo.
// Sorted by real part descending, then imaginary part descending.
// dim_cap guards against accidentally requesting a dense spectrum of a
// matrix too large for O(n^3) iteration.
std::vector<std::complex<double>> full_spectrum(const Matrix& matrix,
                                                std::size_t dim_cap = 500);

// Expected absorption times of the substochastic chain S: solves (I-S)x = 1.
std::vector<double> expected_absorption_fundamental(const Matrix& s);

// Max distance between the sorted real parts and their reflection about the
// midpoint (max+min)/2; a diagnostic for the observed symmetry of aggregated
// invasion spectra.
double spectrum_reflection_defect(std::span<const std::complex<double>> eigenvalues);

// Transition matrix of the aggregated chain restricted to the transient
// states (canonical order), with the mass into the two consensus states
// dropped.  Dimension (m+1)(n+1) - 4.
struct SubstochasticMatrix {
  Matrix entries;
  std::vector<InducedState> states;
  int m = 0;
  int n = 0;
};

SubstochasticMatrix build_S(int m, int n, std::size_t state_cap = 10'000);

// Expands a vector indexed by the transient-state order onto the full
// (m+1) x (n+1) grid, zero on the four excluded pairs.  Grid index is
// k * (n+1) + l.
std::vector<double> grid_from_transient(std::span<const double> values, int m, int n);

}  // namespace invasion
