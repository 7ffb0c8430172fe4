#include "sswt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sswt/error.hpp"

namespace sswt {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape() + " vs " + b.shape());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape());
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape());
  }
  if (values_.size() != rows * cols) {
    throw ShapeError("matrix " + shape() + " given " + std::to_string(values_.size()) +
                     " values");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged row list in Matrix::from_rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + a.shape() + " x " + b.shape());
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.cols();
  const std::size_t p = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = &c(i, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < p; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: row counts differ, " + a.shape() + "ᵀ x " + b.shape());
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t p = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* brow = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* out = &c(i, 0);
      for (std::size_t j = 0; j < p; ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: column counts differ, " + a.shape() + " x " + b.shape() + "ᵀ");
  }
  Matrix c(a.rows(), b.rows());
  const std::size_t n = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += arow[k] * brow[k];
      c(i, j) = acc;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix c = a;
  auto out = c.values();
  auto in = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "subtract");
  Matrix c = a;
  auto out = c.values();
  auto in = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= in[i];
  return c;
}

Matrix scale(const Matrix& a, double factor) {
  Matrix c = a;
  for (double& v : c.values()) v *= factor;
  return c;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("add_row_broadcast: expected 1x" + std::to_string(a.cols()) + " row, got " +
                     row.shape());
  }
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto r = c.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += row(0, j);
  }
  return c;
}

Matrix column_sums(const Matrix& a) {
  Matrix s(1, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(0, j) += a(i, j);
  return s;
}

Matrix mean_rows(const Matrix& a) {
  return scale(column_sums(a), 1.0 / static_cast<double>(a.rows()));
}

Matrix scale_columns(const Matrix& a, std::span<const double> weights) {
  if (weights.size() != a.cols()) {
    throw ShapeError("scale_columns: " + std::to_string(weights.size()) + " weights for " +
                     a.shape() + " matrix");
  }
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto r = c.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] *= weights[j];
  }
  return c;
}

Matrix hconcat(std::span<const Matrix> blocks) {
  if (blocks.empty()) throw ShapeError("hconcat: no blocks");
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) {
      throw ShapeError("hconcat: row mismatch " + blocks.front().shape() + " vs " + b.shape());
    }
    cols += b.cols();
  }
  Matrix c(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(b.row(i).begin(), b.row(i).end(), c.row(i).begin() + offset);
    offset += b.cols();
  }
  return c;
}

Matrix column_block(const Matrix& a, std::size_t first, std::size_t count) {
  if (first + count > a.cols()) {
    throw ShapeError("column_block: columns [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " + a.shape());
  }
  Matrix c(a.rows(), count);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = a.row(i).subspan(first, count);
    std::copy(src.begin(), src.end(), c.row(i).begin());
  }
  return c;
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double total = 0.0;
    for (double& v : r) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : r) v /= total;
  }
  return out;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix elementwise(Elementwise kind, const Matrix& m) {
  Matrix out = m;
  switch (kind) {
    case Elementwise::relu:
      for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
      break;
    case Elementwise::sigmoid:
      for (double& v : out.values()) v = sigmoid(v);
      break;
    case Elementwise::ln:
      for (double& v : out.values()) {
        if (!(v > 0.0)) throw DomainError("ln of non-positive entry " + std::to_string(v));
        v = std::log(v);
      }
      break;
  }
  return out;
}

Matrix layer_norm_rows(const Matrix& m, double eps) {
  Matrix out = m;
  const double n = static_cast<double>(m.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (double& v : r) v = (v - mean) * inv;
  }
  return out;
}

MatmulGrad matmul_pullback(const Matrix& a, const Matrix& b, const Matrix& upstream) {
  if (upstream.rows() != a.rows() || upstream.cols() != b.cols()) {
    throw ShapeError("matmul_pullback: upstream " + upstream.shape() + " for product of " +
                     a.shape() + " and " + b.shape());
  }
  return {matmul_nt(upstream, b), matmul_tn(a, upstream)};
}

Matrix softmax_rows_pullback(const Matrix& output, const Matrix& upstream) {
  require_same_shape(output, upstream, "softmax_rows_pullback");
  Matrix grad(output.rows(), output.cols());
  for (std::size_t i = 0; i < output.rows(); ++i) {
    auto y = output.row(i);
    auto dy = upstream.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) dot += y[j] * dy[j];
    auto g = grad.row(i);
    for (std::size_t j = 0; j < y.size(); ++j) g[j] = y[j] * (dy[j] - dot);
  }
  return grad;
}

Matrix elementwise_pullback(Elementwise kind, const Matrix& input, const Matrix& upstream) {
  require_same_shape(input, upstream, "elementwise_pullback");
  Matrix grad = upstream;
  auto g = grad.values();
  auto x = input.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    switch (kind) {
      case Elementwise::relu:
        // subgradient at exactly 0 is 0
        if (!(x[i] > 0.0)) g[i] = 0.0;
        break;
      case Elementwise::sigmoid: {
        const double s = sigmoid(x[i]);
        g[i] *= s * (1.0 - s);
        break;
      }
      case Elementwise::ln:
        if (!(x[i] > 0.0)) throw DomainError("ln pullback at non-positive entry");
        g[i] /= x[i];
        break;
    }
  }
  return grad;
}

Matrix layer_norm_rows_pullback(const Matrix& input, double eps, const Matrix& upstream) {
  require_same_shape(input, upstream, "layer_norm_rows_pullback");
  Matrix grad(input.rows(), input.cols());
  const double n = static_cast<double>(input.cols());
  std::vector<double> xhat(input.cols());
  for (std::size_t i = 0; i < input.rows(); ++i) {
    auto x = input.row(i);
    auto dy = upstream.row(i);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    double mean_dy = 0.0;
    double mean_dy_xhat = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      xhat[j] = (x[j] - mean) * inv;
      mean_dy += dy[j];
      mean_dy_xhat += dy[j] * xhat[j];
    }
    mean_dy /= n;
    mean_dy_xhat /= n;
    auto g = grad.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      g[j] = inv * (dy[j] - mean_dy - xhat[j] * mean_dy_xhat);
    }
  }
  return grad;
}

Matrix mean_rows_pullback(std::size_t rows, const Matrix& upstream) {
  if (upstream.rows() != 1) {
    throw ShapeError("mean_rows_pullback: upstream must be a row, got " + upstream.shape());
  }
  Matrix grad(rows, upstream.cols());
  const double inv = 1.0 / static_cast<double>(rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < upstream.cols(); ++j) grad(i, j) = upstream(0, j) * inv;
  return grad;
}

GradientPair matmul_with_grad(const Matrix& a, const Matrix& b) {
  return {matmul(a, b), [a, b](const Matrix& up) {
            auto g = matmul_pullback(a, b, up);
            return std::vector<Matrix>{std::move(g.da), std::move(g.db)};
          }};
}

GradientPair softmax_rows_with_grad(const Matrix& m) {
  Matrix y = softmax_rows(m);
  return {y, [y](const Matrix& up) { return std::vector<Matrix>{softmax_rows_pullback(y, up)}; }};
}

GradientPair elementwise_with_grad(Elementwise kind, const Matrix& m) {
  return {elementwise(kind, m), [kind, m](const Matrix& up) {
            return std::vector<Matrix>{elementwise_pullback(kind, m, up)};
          }};
}

GradientPair layer_norm_rows_with_grad(const Matrix& m, double eps) {
  return {layer_norm_rows(m, eps), [m, eps](const Matrix& up) {
            return std::vector<Matrix>{layer_norm_rows_pullback(m, eps, up)};
          }};
}

double grad_check(const ScalarFunction& f, std::span<const double> analytic,
                  std::span<const double> x0, double h) {
  if (!(h > 0.0)) throw DomainError("grad_check: step must be positive");
  if (analytic.size() != x0.size()) {
    throw ShapeError("grad_check: " + std::to_string(analytic.size()) +
                     " analytic entries for " + std::to_string(x0.size()) + " coordinates");
  }
  std::vector<double> x(x0.begin(), x0.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(x);
    x[i] = saved - h;
    const double fm = f(x);
    x[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(analytic[i])) {
      return std::numeric_limits<double>::infinity();
    }
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace sswt
