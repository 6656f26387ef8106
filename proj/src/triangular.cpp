#include "invnet/triangular.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "invnet/error.hpp"

namespace invnet {

namespace {

void check_diagonal(std::span<const double> diag, const char* context) {
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (!(std::abs(diag[i]) >= TriangularParams::kMinDiagonal)) {
      throw SingularityError(std::string(context) + ": diagonal constant k[" + std::to_string(i) +
                                 "] has magnitude below 1e-12",
                             i);
    }
  }
}

void check_dim(const char* what, const TriangularParams& p, const Vector& v) {
  if (v.dim() != p.n()) throw DimensionError(what, p.n(), v.dim());
}

}  // namespace

TriangularParams::TriangularParams(std::size_t n, double diag)
    : n_(n), lower_(triangle_size(n), 0.0), upper_(triangle_size(n), 0.0), diag_(n, diag) {
  if (n == 0) throw DimensionError("TriangularParams: dimension must be positive", 1, 0);
  check_diagonal(diag_, "TriangularParams");
}

TriangularParams::TriangularParams(std::size_t n, std::vector<double> lower,
                                   std::vector<double> upper, std::vector<double> diagonal)
    : n_(n), lower_(std::move(lower)), upper_(std::move(upper)), diag_(std::move(diagonal)) {
  if (n == 0) throw DimensionError("TriangularParams: dimension must be positive", 1, 0);
  if (lower_.size() != triangle_size(n))
    throw DimensionError("TriangularParams lower entries", triangle_size(n), lower_.size());
  if (upper_.size() != triangle_size(n))
    throw DimensionError("TriangularParams upper entries", triangle_size(n), upper_.size());
  if (diag_.size() != n) throw DimensionError("TriangularParams diagonal", n, diag_.size());
  check_diagonal(diag_, "TriangularParams");
}

Matrix materialize_lower(const TriangularParams& p) {
  const std::size_t n = p.n();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = p.lower_row(i);
    for (std::size_t j = 0; j < i; ++j) m(i, j) = row[j];
    m(i, i) = 1.0;
  }
  return m;
}

Matrix materialize_upper(const TriangularParams& p) {
  const std::size_t n = p.n();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = p.diagonal()[i];
    const auto row = p.upper_row(i);
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = row[j - i - 1];
  }
  return m;
}

Matrix compose_weight(const TriangularParams& p) {
  return matmul(materialize_lower(p), materialize_upper(p));
}

Vector apply_upper(const TriangularParams& p, const Vector& x) {
  check_dim("apply_upper", p, x);
  const std::size_t n = p.n();
  const auto k = p.diagonal();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = k[i] * x[i] + dot(p.upper_row(i), x.span().subspan(i + 1));
  }
  return out;
}

Vector apply_lower(const TriangularParams& p, const Vector& z) {
  check_dim("apply_lower", p, z);
  const std::size_t n = p.n();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = z[i] + dot(p.lower_row(i), z.span().first(i));
  }
  return out;
}

Vector apply_weight(const TriangularParams& p, const Vector& x) {
  return apply_lower(p, apply_upper(p, x));
}

Vector apply_lower_transpose(const TriangularParams& p, const Vector& g) {
  check_dim("apply_lower_transpose", p, g);
  const std::size_t n = p.n();
  Vector out = g;
  // (L^T g)_j = g_j + sum_{i>j} l_ij g_i; scatter row by row to stay contiguous.
  for (std::size_t i = 1; i < n; ++i) {
    const auto row = p.lower_row(i);
    const double gi = g[i];
    for (std::size_t j = 0; j < i; ++j) out[j] += row[j] * gi;
  }
  return out;
}

Vector apply_upper_transpose(const TriangularParams& p, const Vector& g) {
  check_dim("apply_upper_transpose", p, g);
  const std::size_t n = p.n();
  const auto k = p.diagonal();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    out[i] += k[i] * gi;
    const auto row = p.upper_row(i);
    for (std::size_t j = i + 1; j < n; ++j) out[j] += row[j - i - 1] * gi;
  }
  return out;
}

Vector apply_weight_transpose(const TriangularParams& p, const Vector& g) {
  return apply_upper_transpose(p, apply_lower_transpose(p, g));
}

Vector solve_weight(const TriangularParams& p, const Vector& b) {
  check_dim("solve_weight", p, b);
  const std::size_t n = p.n();
  const auto k = p.diagonal();
  check_diagonal(k, "solve_weight");

  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = b[i] - dot(p.lower_row(i), z.span().first(i));
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    x[i] = (z[i] - dot(p.upper_row(i), x.span().subspan(i + 1))) / k[i];
  }
  return x;
}

double determinant(const TriangularParams& p) {
  double det = 1.0;
  for (double k : p.diagonal()) det *= k;
  return det;
}

double inverse_norm1(const TriangularParams& p) {
  const std::size_t n = p.n();
  double best = 0.0;
  Vector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = solve_weight(p, e);
    e[j] = 0.0;
    double sum = 0.0;
    for (double v : col) sum += std::abs(v);
    if (sum > best) best = sum;
  }
  return best;
}

double condition_1norm(const TriangularParams& p) {
  return norm1(compose_weight(p)) * inverse_norm1(p);
}

}  // namespace invnet
