#include "invnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invnet/error.hpp"
#include "invnet/rng.hpp"

namespace invnet {

void NetConfig::validate() const {
  if (dim == 0) throw ConfigError("net.dim must be positive");
  if (depth == 0) throw ConfigError("net.depth must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("net.alpha must be positive");
  if (!diagonals.empty() && diagonals.size() != 1 && diagonals.size() != depth)
    throw ConfigError("net.diagonals must have 1 or depth entries");
  for (double k : diagonals)
    if (!(std::abs(k) >= TriangularParams::kMinDiagonal) || !std::isfinite(k))
      throw ConfigError("net.diagonals entries must be finite with magnitude >= 1e-12");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ConfigError("net.init_scale must be >= 0");
  if (!(bias_scale >= 0.0) || !std::isfinite(bias_scale)) throw ConfigError("net.bias_scale must be >= 0");
}

double NetConfig::diagonal_for(std::size_t block) const {
  if (diagonals.empty()) return 1.0;
  if (diagonals.size() == 1) return diagonals.front();
  return diagonals.at(block);
}

InvertibleNet::InvertibleNet(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigError("InvertibleNet needs at least one block");
  dim_ = blocks_.front().linear.dim();
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].linear.dim() != dim_)
      throw DimensionError("InvertibleNet block " + std::to_string(b), dim_, blocks_[b].linear.dim());
  }
}

InvertibleNet InvertibleNet::initialize(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = cfg.dim;
  const double half_width = cfg.init_scale / std::sqrt(static_cast<double>(n));
  Rng rng(seed, Stream::kInit);

  std::vector<Block> blocks;
  blocks.reserve(cfg.depth);
  for (std::size_t b = 0; b < cfg.depth; ++b) {
    std::vector<double> lower(TriangularParams::triangle_size(n));
    std::vector<double> upper(TriangularParams::triangle_size(n));
    for (double& v : lower) v = rng.uniform(-half_width, half_width);
    for (double& v : upper) v = rng.uniform(-half_width, half_width);
    Vector bias(n);
    if (cfg.bias_scale > 0.0)
      for (double& v : bias) v = rng.uniform(-cfg.bias_scale, cfg.bias_scale);

    TriangularParams params(n, std::move(lower), std::move(upper),
                            std::vector<double>(n, cfg.diagonal_for(b)));
    const bool last = b + 1 == cfg.depth;
    Activation act = (last && cfg.final_activation == FinalActivation::kIdentity)
                         ? Activation{Identity{}}
                         : Activation{LeakyReLU(cfg.alpha)};
    blocks.push_back(Block{InvertibleLinear(std::move(params), std::move(bias)), act});
  }
  return InvertibleNet(std::move(blocks));
}

namespace {

void check_input(const char* what, const InvertibleNet& net, const Vector& v) {
  if (v.dim() != net.dim()) throw DimensionError(what, net.dim(), v.dim());
  if (!v.all_finite()) throw NumericError(std::string(what) + ": input contains NaN or Inf");
}

}  // namespace

ForwardResult net_forward(const InvertibleNet& net, const Vector& x, bool want_trace) {
  check_input("net_forward", net, x);
  ForwardResult result;
  if (want_trace) {
    result.trace.emplace();
    result.trace->generation = net.generation();
    result.trace->linear.resize(net.depth());
    result.trace->pre_activation.reserve(net.depth());
  }
  Vector h = x;
  LinearCache scratch;
  for (std::size_t b = 0; b < net.depth(); ++b) {
    const Block& block = net.blocks()[b];
    LinearCache& cache = want_trace ? result.trace->linear[b] : scratch;
    Vector pre = linear_forward(block.linear, h, cache);
    h = act_forward(block.activation, pre);
    if (want_trace) result.trace->pre_activation.push_back(std::move(pre));
  }
  result.output = std::move(h);
  return result;
}

Vector net_forward(const InvertibleNet& net, const Vector& x) {
  return net_forward(net, x, false).output;
}

Vector net_inverse(const InvertibleNet& net, const Vector& y) {
  check_input("net_inverse", net, y);
  Vector h = y;
  for (std::size_t b = net.depth(); b-- > 0;) {
    const Block& block = net.blocks()[b];
    h = act_inverse(block.activation, h);
    try {
      h = linear_inverse(block.linear, h);
    } catch (const SingularityError& e) {
      throw SingularityError("block " + std::to_string(b) + ": " + e.what(), e.index());
    }
  }
  return h;
}

NetGradients net_backward(const InvertibleNet& net, const ForwardTrace& trace, const Vector& g) {
  if (trace.linear.size() != net.depth() || trace.pre_activation.size() != net.depth())
    throw TraceError("net_backward: trace has " + std::to_string(trace.linear.size()) +
                     " blocks, net has " + std::to_string(net.depth()));
  if (trace.generation != net.generation())
    throw TraceError("net_backward: trace is stale (parameters changed after the forward pass)");
  if (g.dim() != net.dim()) throw DimensionError("net_backward gradient", net.dim(), g.dim());

  NetGradients out;
  out.blocks.resize(net.depth());
  Vector upstream = g;
  for (std::size_t b = net.depth(); b-- > 0;) {
    const Block& block = net.blocks()[b];
    const Vector d_pre = act_backward(block.activation, trace.pre_activation[b], upstream);
    out.blocks[b] = linear_backward(block.linear, trace.linear[b], d_pre);
    upstream = out.blocks[b].d_input;
  }
  out.d_input = std::move(upstream);
  return out;
}

double round_trip_error(const InvertibleNet& net, std::span<const Vector> xs) {
  double worst = 0.0;
  for (const Vector& x : xs) worst = std::max(worst, max_abs_diff(net_inverse(net, net_forward(net, x)), x));
  return worst;
}

double determinant_product(const InvertibleNet& net) {
  double det = 1.0;
  for (const Block& b : net.blocks()) det *= determinant(b.linear.params());
  return det;
}

std::vector<double> condition_estimates(const InvertibleNet& net) {
  std::vector<double> out;
  out.reserve(net.depth());
  for (const Block& b : net.blocks()) out.push_back(condition_1norm(b.linear.params()));
  return out;
}

double inverse_lipschitz_bound(const InvertibleNet& net) {
  double bound = 1.0;
  for (const Block& b : net.blocks()) {
    bound *= inverse_norm1(b.linear.params());
    if (const auto* leaky = std::get_if<LeakyReLU>(&b.activation))
      bound *= std::max(1.0, 1.0 / leaky->alpha());
  }
  return bound;
}

}  // namespace invnet
