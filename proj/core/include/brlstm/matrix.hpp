#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace brlstm {

/// Dense row-major matrix of doubles. Column vectors are n x 1 matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transposed() const;
  void fill(double v);
  bool all_finite() const noexcept;
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// "RxC", used in error messages.
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ElementwiseOp { add, sub, hadamard };

/// Standard matrix product. Throws DimensionError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

/// Entrywise combination of two equally shaped matrices.
Matrix elementwise(const Matrix& a, const Matrix& b, ElementwiseOp op);

inline Matrix add(const Matrix& a, const Matrix& b) { return elementwise(a, b, ElementwiseOp::add); }
inline Matrix sub(const Matrix& a, const Matrix& b) { return elementwise(a, b, ElementwiseOp::sub); }
inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, ElementwiseOp::hadamard);
}

/// Sum of squares of all entries.
double squared_norm(const Matrix& m) noexcept;

}  // namespace brlstm
