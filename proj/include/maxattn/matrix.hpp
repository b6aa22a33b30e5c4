#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace maxattn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
///
/// Carries every quantity of the constructions: token sequences, weight
/// matrices, key/query products and score matrices. Shapes are fixed at
/// construction and entries are kept finite by every free function below.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  /// Row-wise literal, e.g. {{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }
  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);
  static Matrix row(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row_span(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

  Vector column_vector(std::size_t c) const;
  Matrix transpose() const;
  bool all_finite() const noexcept;
  /// Largest absolute entry (the max-entry norm); 0 for an empty matrix.
  double max_abs() const noexcept;
  std::string shape_string() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double scale, Matrix m);

/// Standard product. Throws DimensionError naming both shapes when
/// A.cols != B.rows, NonFiniteError if the result overflows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Column-wise softmax with max subtraction: each column of the result is
/// a probability vector. Input must be finite.
Matrix softmax_columns(const Matrix& m);

/// Stacks the n columns of a d x n matrix into a (dn) x 1 column.
Matrix flatten_sequence(const Matrix& z);

/// Inverse of flatten_sequence: column-major reshape of a dn-vector into d x n.
Matrix unflatten_sequence(std::span<const double> flat, std::size_t d, std::size_t n);

/// Concatenates a grid of blocks. Blocks in one layout row must agree on
/// row count, blocks in one layout column on column count.
using BlockRow = std::vector<std::reference_wrapper<const Matrix>>;
Matrix assemble_blocks(const std::vector<BlockRow>& layout);

/// Largest absolute entrywise difference; throws DimensionError on shape mismatch.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace maxattn
