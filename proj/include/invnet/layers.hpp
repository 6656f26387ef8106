#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "invnet/linalg.hpp"
#include "invnet/triangular.hpp"

namespace invnet {

// y = W x + b with W = L U.
class InvertibleLinear {
 public:
  InvertibleLinear(TriangularParams params, Vector bias);
  explicit InvertibleLinear(TriangularParams params);

  std::size_t dim() const noexcept { return params_.n(); }
  const TriangularParams& params() const noexcept { return params_; }
  TriangularParams& params() noexcept { return params_; }
  const Vector& bias() const noexcept { return bias_; }
  std::span<double> bias_mut() noexcept { return bias_.span(); }

  friend bool operator==(const InvertibleLinear&, const InvertibleLinear&) = default;

 private:
  TriangularParams params_;
  Vector bias_;
};

// Everything the backward pass needs from one forward call: the input and the
// intermediate U x.
struct LinearCache {
  Vector input;
  Vector upper_times_input;
};

struct LinearGrads {
  std::vector<double> d_lower;  // packed like TriangularParams::lower()
  std::vector<double> d_upper;  // packed like TriangularParams::upper()
  Vector d_bias;
  Vector d_input;
};

Vector linear_forward(const InvertibleLinear& layer, const Vector& x);
Vector linear_forward(const InvertibleLinear& layer, const Vector& x, LinearCache& cache);
Vector linear_inverse(const InvertibleLinear& layer, const Vector& y);

// g is dLoss/d(Wx + b). dLoss/dW = g x^T, so
//   d_lower = mask_lower(g (U x)^T),  d_upper = mask_upper((L^T g) x^T),
//   d_input = U^T L^T g.
// The diagonal k is constant and receives no gradient.
LinearGrads linear_backward(const InvertibleLinear& layer, const LinearCache& cache, const Vector& g);
LinearGrads linear_backward(const InvertibleLinear& layer, const Vector& cached_x, const Vector& g);

class LeakyReLU {
 public:
  static constexpr double kDefaultAlpha = 0.1;

  explicit LeakyReLU(double alpha = kDefaultAlpha);
  double alpha() const noexcept { return alpha_; }

  friend bool operator==(const LeakyReLU&, const LeakyReLU&) = default;

 private:
  double alpha_;
};

struct Identity {
  friend bool operator==(const Identity&, const Identity&) = default;
};

using Activation = std::variant<Identity, LeakyReLU>;

std::string_view activation_name(const Activation& a);

Vector act_forward(const Activation& a, const Vector& x);
Vector act_inverse(const Activation& a, const Vector& y);
// Multiplies g by the derivative at the cached pre-activation x.
Vector act_backward(const Activation& a, const Vector& cached_x, const Vector& g);

}  // namespace invnet
