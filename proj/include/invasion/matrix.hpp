#pragma once

#include <cstddef>
#include <vector>

namespace invasion {

// Dense row-major matrix of doubles.  Deliberately minimal: the library only
// needs storage, element access and a pivoted LU solve.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
    return id;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws std::domain_error on a (numerically) singular system.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

}  // namespace invasion
