#include "invnet/layers.hpp"

#include <cmath>
#include <string>

#include "invnet/error.hpp"

namespace invnet {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

InvertibleLinear::InvertibleLinear(TriangularParams params, Vector bias)
    : params_(std::move(params)), bias_(std::move(bias)) {
  if (bias_.dim() != params_.n()) throw DimensionError("InvertibleLinear bias", params_.n(), bias_.dim());
}

InvertibleLinear::InvertibleLinear(TriangularParams params)
    : params_(std::move(params)), bias_(params_.n()) {}

Vector linear_forward(const InvertibleLinear& layer, const Vector& x) {
  LinearCache unused;
  return linear_forward(layer, x, unused);
}

Vector linear_forward(const InvertibleLinear& layer, const Vector& x, LinearCache& cache) {
  if (x.dim() != layer.dim()) throw DimensionError("linear_forward", layer.dim(), x.dim());
  cache.input = x;
  cache.upper_times_input = apply_upper(layer.params(), x);
  Vector y = apply_lower(layer.params(), cache.upper_times_input);
  const Vector& b = layer.bias();
  for (std::size_t i = 0; i < y.dim(); ++i) y[i] += b[i];
  return y;
}

Vector linear_inverse(const InvertibleLinear& layer, const Vector& y) {
  if (y.dim() != layer.dim()) throw DimensionError("linear_inverse", layer.dim(), y.dim());
  return solve_weight(layer.params(), y - layer.bias());
}

LinearGrads linear_backward(const InvertibleLinear& layer, const LinearCache& cache, const Vector& g) {
  const std::size_t n = layer.dim();
  if (g.dim() != n) throw DimensionError("linear_backward gradient", n, g.dim());
  if (cache.input.dim() != n || cache.upper_times_input.dim() != n)
    throw DimensionError("linear_backward cache", n, cache.input.dim());

  const TriangularParams& p = layer.params();
  const Vector& x = cache.input;
  const Vector& ux = cache.upper_times_input;
  const Vector lt_g = apply_lower_transpose(p, g);

  LinearGrads out;
  out.d_lower.resize(TriangularParams::triangle_size(n));
  out.d_upper.resize(TriangularParams::triangle_size(n));
  std::size_t idx = 0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out.d_lower[idx++] = g[i] * ux[j];
  idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.d_upper[idx++] = lt_g[i] * x[j];
  out.d_bias = g;
  out.d_input = apply_upper_transpose(p, lt_g);
  return out;
}

LinearGrads linear_backward(const InvertibleLinear& layer, const Vector& cached_x, const Vector& g) {
  if (cached_x.dim() != layer.dim()) throw DimensionError("linear_backward input", layer.dim(), cached_x.dim());
  const LinearCache cache{cached_x, apply_upper(layer.params(), cached_x)};
  return linear_backward(layer, cache, g);
}

LeakyReLU::LeakyReLU(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("LeakyReLU: alpha must be positive and finite, got " + std::to_string(alpha));
}

std::string_view activation_name(const Activation& a) {
  return std::visit(overloaded{[](const Identity&) { return std::string_view("identity"); },
                               [](const LeakyReLU&) { return std::string_view("leaky_relu"); }},
                    a);
}

Vector act_forward(const Activation& a, const Vector& x) {
  return std::visit(overloaded{[&](const Identity&) { return x; },
                               [&](const LeakyReLU& act) {
                                 Vector y = x;
                                 for (double& v : y)
                                   if (v < 0.0) v *= act.alpha();
                                 return y;
                               }},
                    a);
}

Vector act_inverse(const Activation& a, const Vector& y) {
  return std::visit(overloaded{[&](const Identity&) { return y; },
                               [&](const LeakyReLU& act) {
                                 Vector x = y;
                                 for (double& v : x)
                                   if (v < 0.0) v /= act.alpha();
                                 return x;
                               }},
                    a);
}

Vector act_backward(const Activation& a, const Vector& cached_x, const Vector& g) {
  if (cached_x.dim() != g.dim()) throw DimensionError("act_backward", cached_x.dim(), g.dim());
  return std::visit(overloaded{[&](const Identity&) { return g; },
                               [&](const LeakyReLU& act) {
                                 Vector out = g;
                                 for (std::size_t i = 0; i < out.dim(); ++i)
                                   if (cached_x[i] < 0.0) out[i] *= act.alpha();
                                 return out;
                               }},
                    a);
}

}  // namespace invnet
