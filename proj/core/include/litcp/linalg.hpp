#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace litcp {

/// Dense row-major matrix with contiguous storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-major initializer; every row must have the same length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::vector<double> column(std::size_t j) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using FactorMatrix = Matrix;

/// Column-wise Kronecker product: column r of the result is
/// kron(a[:, r], b[:, r]), with row index i * b.rows() + j.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// a^T a.
Matrix gram(const Matrix& a);

/// Elementwise product of equally-shaped matrices. Throws on an empty list.
Matrix hadamard_all(std::span<const Matrix> mats);

/// Solves X * g = rhs for X with g symmetric positive semi-definite.
///
/// Uses a Cholesky factorization when g is numerically positive definite.
/// Otherwise a ridge of 1e-12 * trace(g) / R is added to the diagonal and a
/// pivoted LDL^T solve is used, so a singular g never aborts. A zero g
/// yields a zero X.
Matrix solve_gram(const Matrix& g, const Matrix& rhs);

struct NormalizedColumns {
  Matrix matrix;
  std::vector<double> weights;
};

/// Divides every column by its sum so it sums to 1; the sums become the
/// weights. A column with a negative sum therefore gets a negative weight and
/// is sign-flipped. All-zero columns keep weight 0. Columns whose entries
/// cancel to a (relatively) zero sum cannot be normalized; they are returned
/// unchanged with weight 1.
NormalizedColumns normalize_columns_l1(const Matrix& a);

/// Euclidean norm of each column.
std::vector<double> column_norms(const Matrix& a);

}  // namespace litcp
