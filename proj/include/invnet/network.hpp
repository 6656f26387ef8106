#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invnet/layers.hpp"

namespace invnet {

struct Block {
  InvertibleLinear linear;
  Activation activation;

  friend bool operator==(const Block&, const Block&) = default;
};

enum class FinalActivation { kIdentity, kLeakyReLU };

struct NetConfig {
  std::size_t dim = 4;
  std::size_t depth = 3;
  double alpha = LeakyReLU::kDefaultAlpha;
  // Regression default; kLeakyReLU reproduces sigma_n as the outermost map.
  FinalActivation final_activation = FinalActivation::kIdentity;
  // Diagonal constant per layer (every k_i of layer b equals diagonals[b]).
  // Empty means 1 for every layer; a single entry is broadcast.
  std::vector<double> diagonals;
  // l and u entries start uniform in [-init_scale/sqrt(n), init_scale/sqrt(n)].
  double init_scale = 0.1;
  // Biases start uniform in [-bias_scale, bias_scale]; 0 gives zero biases.
  double bias_scale = 0.0;

  void validate() const;
  double diagonal_for(std::size_t block) const;
};

class InvertibleNet {
 public:
  explicit InvertibleNet(std::vector<Block> blocks);

  static InvertibleNet initialize(const NetConfig& cfg, std::uint64_t seed);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t depth() const noexcept { return blocks_.size(); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Block& block(std::size_t i) const { return blocks_.at(i); }

  // Mutable access invalidates outstanding traces.
  Block& mutable_block(std::size_t i) {
    ++generation_;
    return blocks_.at(i);
  }
  std::uint64_t generation() const noexcept { return generation_; }

  // Parameter equality; the generation counter is bookkeeping.
  friend bool operator==(const InvertibleNet& a, const InvertibleNet& b) { return a.blocks_ == b.blocks_; }

 private:
  std::size_t dim_;
  std::vector<Block> blocks_;
  std::uint64_t generation_ = 0;
};

struct ForwardTrace {
  std::uint64_t generation = 0;
  std::vector<LinearCache> linear;     // per block
  std::vector<Vector> pre_activation;  // per block, W x + b
};

struct ForwardResult {
  Vector output;
  std::optional<ForwardTrace> trace;
};

ForwardResult net_forward(const InvertibleNet& net, const Vector& x, bool want_trace);
Vector net_forward(const InvertibleNet& net, const Vector& x);
Vector net_inverse(const InvertibleNet& net, const Vector& y);

struct NetGradients {
  std::vector<LinearGrads> blocks;
  Vector d_input;
};

// Reverse sweep. g is dLoss/d(output). Throws TraceError if the trace is
// missing entries or was recorded before the last parameter mutation.
NetGradients net_backward(const InvertibleNet& net, const ForwardTrace& trace, const Vector& g);

// max over xs of ||f^-1(f(x)) - x||_inf.
double round_trip_error(const InvertibleNet& net, std::span<const Vector> xs);

double determinant_product(const InvertibleNet& net);
std::vector<double> condition_estimates(const InvertibleNet& net);

// Upper bound on the 1-norm Lipschitz constant of f^-1:
// prod_b ||W_b^-1||_1 * max(1, 1/alpha_b).
double inverse_lipschitz_bound(const InvertibleNet& net);

}  // namespace invnet
