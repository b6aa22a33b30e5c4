#include "maxattn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxattn/errors.hpp"

namespace maxattn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: " + std::to_string(values_.size()) +
                         " values do not fill a " + shape_string() + " matrix");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged row literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::row(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Vector Matrix::column_vector(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double scale, Matrix m) { return m *= scale; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + a.shape_string() + " by " +
                         b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  // i-k-j order; the constructed weight matrices are mostly zeros, so
  // skipping zero multipliers removes most of the work.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row_span(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto b_row = b.row_span(k);
      for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  if (!out.all_finite()) {
    throw NonFiniteError("matmul: non-finite entry in " + out.shape_string() + " product");
  }
  return out;
}

Matrix softmax_columns(const Matrix& m) {
  if (!m.all_finite()) throw NonFiniteError("softmax_columns: input is not finite");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix out(rows, cols);
  if (rows == 0) return out;
  Vector col_max(cols, -INFINITY);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = m.row_span(r);
    for (std::size_t c = 0; c < cols; ++c) col_max[c] = std::max(col_max[c], row[c]);
  }
  Vector col_sum(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto in = m.row_span(r);
    auto o = out.row_span(r);
    for (std::size_t c = 0; c < cols; ++c) {
      o[c] = std::exp(in[c] - col_max[c]);
      col_sum[c] += o[c];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    auto o = out.row_span(r);
    for (std::size_t c = 0; c < cols; ++c) o[c] /= col_sum[c];
  }
  return out;
}

Matrix flatten_sequence(const Matrix& z) {
  Matrix flat(z.rows() * z.cols(), 1);
  for (std::size_t k = 0; k < z.cols(); ++k)
    for (std::size_t r = 0; r < z.rows(); ++r) flat(k * z.rows() + r, 0) = z(r, k);
  return flat;
}

Matrix unflatten_sequence(std::span<const double> flat, std::size_t d, std::size_t n) {
  if (flat.size() != d * n) {
    throw DimensionError("unflatten_sequence: " + std::to_string(flat.size()) +
                         " values cannot form a " + std::to_string(d) + "x" +
                         std::to_string(n) + " sequence");
  }
  Matrix z(d, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t r = 0; r < d; ++r) z(r, k) = flat[k * d + r];
  return z;
}

Matrix assemble_blocks(const std::vector<BlockRow>& layout) {
  if (layout.empty() || layout.front().empty()) return {};
  const std::size_t block_cols = layout.front().size();
  std::vector<std::size_t> col_widths(block_cols);
  for (std::size_t j = 0; j < block_cols; ++j) col_widths[j] = layout[0][j].get().cols();

  std::size_t total_rows = 0;
  std::vector<std::size_t> row_heights(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].size() != block_cols) {
      throw DimensionError("assemble_blocks: layout row " + std::to_string(i) + " has " +
                           std::to_string(layout[i].size()) + " blocks, expected " +
                           std::to_string(block_cols));
    }
    row_heights[i] = layout[i][0].get().rows();
    for (std::size_t j = 0; j < block_cols; ++j) {
      const Matrix& b = layout[i][j].get();
      if (b.rows() != row_heights[i] || b.cols() != col_widths[j]) {
        throw DimensionError("assemble_blocks: block (" + std::to_string(i) + "," +
                             std::to_string(j) + ") is " + b.shape_string() + ", expected " +
                             std::to_string(row_heights[i]) + "x" +
                             std::to_string(col_widths[j]));
      }
    }
    total_rows += row_heights[i];
  }
  std::size_t total_cols = 0;
  for (std::size_t w : col_widths) total_cols += w;

  Matrix out(total_rows, total_cols);
  std::size_t row0 = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::size_t col0 = 0;
    for (std::size_t j = 0; j < block_cols; ++j) {
      const Matrix& b = layout[i][j].get();
      for (std::size_t r = 0; r < b.rows(); ++r) {
        const auto src = b.row_span(r);
        std::copy(src.begin(), src.end(), out.row_span(row0 + r).begin() + col0);
      }
      col0 += col_widths[j];
    }
    row0 += row_heights[i];
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace maxattn
