#include "invnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "invnet/error.hpp"

namespace invnet {

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_dim(const char* what, const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw DimensionError(what, a.dim(), b.dim());
}

}  // namespace

Vector operator+(const Vector& a, const Vector& b) {
  require_same_dim("vector add", a, b);
  Vector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_dim("vector subtract", a, b);
  Vector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector operator*(double s, const Vector& a) {
  Vector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = s * a[i];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  require_same_dim("max_abs_diff", a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double mean_squared_diff(const Vector& a, const Vector& b) {
  require_same_dim("mean_squared_diff", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.dim());
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) throw DimensionError("matrix storage", rows_ * cols_, data_.size());
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul", a.cols(), b.rows());
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) throw DimensionError("matvec", a.cols(), x.dim());
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x.span());
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) col += std::abs(a(i, j));
    best = std::max(best, col);
  }
  return best;
}

Matrix dense_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("dense_inverse (square)", n, a.cols());
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (work(pivot, col) == 0.0) throw SingularityError("dense_inverse: singular matrix", col);
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(col, j), work(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const double scale = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

double dense_determinant(Matrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("dense_determinant (square)", n, a.cols());
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

}  // namespace invnet
