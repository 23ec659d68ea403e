#pragma once

// Small dense linear algebra for the d <= 20 matrices this library touches.
// Row-major storage, no expression templates.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace orthant {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  /// Writes both (i, j) and (j, i).
  void set_symmetric(std::size_t i, std::size_t j, double v) {
    (*this)(i, j) = v;
    (*this)(j, i) = v;
  }

  double max_abs() const;
  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> v);

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Only the lower triangle of the input is read.
class Cholesky {
 public:
  /// Returns std::nullopt on failure; `failed_minor` (if non-null) receives
  /// the 1-based order of the first leading minor that is not positive.
  static std::optional<Cholesky> factor(const Matrix& a, std::size_t* failed_minor = nullptr);

  std::size_t size() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  /// Solves A z = b.
  std::vector<double> solve(std::span<const double> b) const;
  /// Solves L z = b.
  std::vector<double> solve_lower(std::span<const double> b) const;
  Matrix inverse() const;
  double log_det() const;

 private:
  explicit Cholesky(Matrix lower) : lower_(std::move(lower)) {}
  Matrix lower_;
};

/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi). Used by
/// diagnostics and tests only.
double min_eigenvalue(const Matrix& a);

/// Gaussian elimination with partial pivoting; an implementation of A^{-1}
/// that does not go through Cholesky.
Matrix lu_inverse(const Matrix& a);

}  // namespace orthant
