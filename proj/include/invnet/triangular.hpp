#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invnet/linalg.hpp"

namespace invnet {

// LU-structured square weight W = L * U.
//
// L is unit lower triangular with trainable strict-lower entries, U is upper
// triangular with trainable strict-upper entries and a fixed diagonal k.
// det(W) = prod(k), so W stays invertible no matter how l and u move.
//
// Storage: both strict triangles are packed row-major. lower holds (i, j)
// with i > j in order (1,0), (2,0), (2,1), (3,0)...; upper holds (i, j) with
// i < j in order (0,1), (0,2)...(0,n-1), (1,2)... The layout is part of the
// checkpoint format.
class TriangularParams {
 public:
  static constexpr double kMinDiagonal = 1e-12;

  // l = u = 0, every k_i = diag.
  explicit TriangularParams(std::size_t n, double diag = 1.0);
  TriangularParams(std::size_t n, std::vector<double> lower, std::vector<double> upper,
                   std::vector<double> diagonal);

  static constexpr std::size_t triangle_size(std::size_t n) noexcept { return n * (n - 1) / 2; }
  static constexpr std::size_t lower_index(std::size_t i, std::size_t j) noexcept {
    return i * (i - 1) / 2 + j;
  }
  static constexpr std::size_t upper_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
    return i * (n - 1) - i * (i - 1) / 2 + (j - i - 1);
  }
  // Packed row i of the strict lower triangle: entries (i, 0..i-1).
  std::span<const double> lower_row(std::size_t i) const {
    return std::span<const double>(lower_).subspan(i * (i - 1) / 2, i);
  }
  // Packed row i of the strict upper triangle: entries (i, i+1..n-1).
  std::span<const double> upper_row(std::size_t i) const {
    return std::span<const double>(upper_).subspan(upper_index(n_, i, i + 1), n_ - 1 - i);
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> upper() const noexcept { return upper_; }
  std::span<const double> diagonal() const noexcept { return diag_; }

  // Trainable entries. The diagonal is read-only after construction, so
  // det(W) cannot drift during training.
  std::span<double> lower_mut() noexcept { return lower_; }
  std::span<double> upper_mut() noexcept { return upper_; }

  friend bool operator==(const TriangularParams&, const TriangularParams&) = default;

 private:
  std::size_t n_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> diag_;
};

Matrix materialize_lower(const TriangularParams& p);
Matrix materialize_upper(const TriangularParams& p);
Matrix compose_weight(const TriangularParams& p);

// U x and L z, each O(n^2) on the packed storage.
Vector apply_upper(const TriangularParams& p, const Vector& x);
Vector apply_lower(const TriangularParams& p, const Vector& z);
// W x = L (U x) without forming W.
Vector apply_weight(const TriangularParams& p, const Vector& x);
// L^T g and U^T g.
Vector apply_lower_transpose(const TriangularParams& p, const Vector& g);
Vector apply_upper_transpose(const TriangularParams& p, const Vector& g);
// W^T g = U^T (L^T g).
Vector apply_weight_transpose(const TriangularParams& p, const Vector& g);

// Solves W x = b by forward substitution (L z = b) then back substitution
// (U x = z). Throws SingularityError naming the index of a degenerate k_i.
Vector solve_weight(const TriangularParams& p, const Vector& b);

// prod(k); L has unit diagonal.
double determinant(const TriangularParams& p);

// ||W||_1 * ||W^-1||_1, computed exactly from n solves. O(n^3); intended for
// monitoring at desk-scale widths.
double condition_1norm(const TriangularParams& p);
// ||W^-1||_1 alone, used to bound inverse-map amplification.
double inverse_norm1(const TriangularParams& p);

}  // namespace invnet
