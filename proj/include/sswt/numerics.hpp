#pragma once

// Dense row-major matrices with hand-written pullbacks (vector-Jacobian
// products) for every differentiable operation the model uses.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sswt {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }

  /// "rows x cols", used in error messages.
  std::string shape() const;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Forward operations
// ---------------------------------------------------------------------------

Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·b without materialising the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a·bᵀ without materialising the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
/// Adds a 1×cols row vector to every row of `a`.
Matrix add_row_broadcast(const Matrix& a, const Matrix& row);
/// Column sums as a 1×cols matrix (pullback of add_row_broadcast w.r.t. the row).
Matrix column_sums(const Matrix& a);
/// Column means as a 1×cols matrix (mean pooling over rows).
Matrix mean_rows(const Matrix& a);
/// Multiplies column j of `a` by weights[j].
Matrix scale_columns(const Matrix& a, std::span<const double> weights);
/// Horizontal concatenation; all blocks share a row count.
Matrix hconcat(std::span<const Matrix> blocks);
/// Columns [first, first + count) of `a`.
Matrix column_block(const Matrix& a, std::size_t first, std::size_t count);

Matrix softmax_rows(const Matrix& m);

enum class Elementwise { relu, sigmoid, ln };

Matrix elementwise(Elementwise kind, const Matrix& m);
double sigmoid(double x) noexcept;

/// Per-row normalisation to zero mean and unit variance (no learned gain/bias).
Matrix layer_norm_rows(const Matrix& m, double eps);

// ---------------------------------------------------------------------------
// Pullbacks. Each returns the sensitivity of the inputs given the upstream
// sensitivity `upstream` of the output. Shapes equal the input shapes.
// ---------------------------------------------------------------------------

struct MatmulGrad {
  Matrix da;
  Matrix db;
};
MatmulGrad matmul_pullback(const Matrix& a, const Matrix& b, const Matrix& upstream);

/// `output` is the softmax result (the pullback only needs that).
Matrix softmax_rows_pullback(const Matrix& output, const Matrix& upstream);
Matrix elementwise_pullback(Elementwise kind, const Matrix& input, const Matrix& upstream);
Matrix layer_norm_rows_pullback(const Matrix& input, double eps, const Matrix& upstream);
Matrix mean_rows_pullback(std::size_t rows, const Matrix& upstream);

/// A value together with the closure that maps an upstream sensitivity to one
/// sensitivity per input, in argument order.
struct GradientPair {
  Matrix value;
  std::function<std::vector<Matrix>(const Matrix& upstream)> pullback;
};

GradientPair matmul_with_grad(const Matrix& a, const Matrix& b);
GradientPair softmax_rows_with_grad(const Matrix& m);
GradientPair elementwise_with_grad(Elementwise kind, const Matrix& m);
GradientPair layer_norm_rows_with_grad(const Matrix& m, double eps);

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
/// A non-finite evaluation of `f` yields +infinity, i.e. a failed check.
double grad_check(const ScalarFunction& f, std::span<const double> analytic,
                  std::span<const double> x0, double h);

}  // namespace sswt
