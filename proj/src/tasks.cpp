#include "invnet/tasks.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "invnet/error.hpp"
#include "invnet/rng.hpp"

namespace invnet {

std::string_view function_kind_name(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::kSine:
      return "sine";
    case FunctionKind::kPolynomial:
      return "polynomial";
    case FunctionKind::kExponential:
      return "exponential";
  }
  return "unknown";
}

FunctionKind parse_function_kind(std::string_view name) {
  if (name == "sine") return FunctionKind::kSine;
  if (name == "polynomial") return FunctionKind::kPolynomial;
  if (name == "exponential") return FunctionKind::kExponential;
  throw ConfigError("task.kind: unknown function '" + std::string(name) + "'");
}

Interval default_domain(FunctionKind kind) {
  if (kind == FunctionKind::kSine) return {-std::numbers::pi / 2, std::numbers::pi / 2};
  return {-1.0, 1.0};
}

double apply_function(FunctionKind kind, double x) {
  switch (kind) {
    case FunctionKind::kSine:
      return std::sin(x);
    case FunctionKind::kPolynomial:
      return x * x * x + x;
    case FunctionKind::kExponential:
      return std::exp(x);
  }
  return 0.0;
}

void FunctionTaskSpec::validate() const {
  if (dim == 0) throw ConfigError("task.dim must be positive");
  if (train_count == 0) throw ConfigError("task.train_count must be positive");
  if (eval_count == 0) throw ConfigError("task.eval_count must be positive");
  const Interval d = effective_domain();
  if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo < d.hi))
    throw ConfigError("task.domain: interval must be finite and non-empty");
  if (kind == FunctionKind::kSine && (d.lo < -std::numbers::pi / 2 || d.hi > std::numbers::pi / 2))
    throw ConfigError("task.domain: sine is only injective within [-pi/2, pi/2]");
  if (!std::isfinite(apply_function(kind, d.lo)) || !std::isfinite(apply_function(kind, d.hi)))
    throw ConfigError("task.domain: target overflows on the interval");
}

namespace {

Vector draw_uniform(Rng& rng, std::size_t dim, Interval d) {
  Vector v(dim);
  for (double& x : v) x = rng.uniform(d.lo, d.hi);
  return v;
}

// Draws count vectors whose values never appear in `taken`, inserting them.
std::vector<Vector> draw_distinct(Rng& rng, std::size_t count, std::size_t dim, Interval d,
                                  std::set<std::vector<double>>& taken) {
  std::vector<Vector> out;
  out.reserve(count);
  while (out.size() < count) {
    Vector v = draw_uniform(rng, dim, d);
    if (taken.insert(v.values()).second) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

SplitDataset generate_function_dataset(const FunctionTaskSpec& spec) {
  spec.validate();
  const Interval d = spec.effective_domain();
  std::set<std::vector<double>> taken;
  Rng train_rng(spec.seed, Stream::kTrainInputs);
  Rng eval_rng(spec.seed, Stream::kEvalInputs);

  SplitDataset out;
  out.train.inputs = draw_distinct(train_rng, spec.train_count, spec.dim, d, taken);
  out.eval.inputs = draw_distinct(eval_rng, spec.eval_count, spec.dim, d, taken);
  for (PairedSamples* split : {&out.train, &out.eval}) {
    split->targets.reserve(split->inputs.size());
    for (const Vector& x : split->inputs) {
      Vector y(x.dim());
      for (std::size_t i = 0; i < x.dim(); ++i) y[i] = apply_function(spec.kind, x[i]);
      split->targets.push_back(std::move(y));
    }
  }
  return out;
}

NetConfig embedding_oracle_config(std::size_t dim, std::size_t depth) {
  NetConfig cfg;
  cfg.dim = dim;
  cfg.depth = depth;
  cfg.alpha = LeakyReLU::kDefaultAlpha;
  cfg.final_activation = FinalActivation::kIdentity;
  cfg.init_scale = 1.0;
  cfg.bias_scale = 0.1;
  return cfg;
}

EmbeddingPairSet generate_embedding_pairs(std::size_t dim, std::size_t count, std::size_t depth,
                                          std::uint64_t seed) {
  if (dim < 2) throw ConfigError("embedding dim must be at least 2");
  if (depth == 0) throw ConfigError("embedding oracle depth must be at least 1");
  InvertibleNet oracle = InvertibleNet::initialize(embedding_oracle_config(dim, depth),
                                                   derive_seed(seed, Stream::kOracle));
  return embedding_pairs_from_oracle(std::move(oracle), count, seed);
}

EmbeddingPairSet embedding_pairs_from_oracle(InvertibleNet oracle, std::size_t count,
                                             std::uint64_t seed) {
  if (count == 0) throw ConfigError("embedding count must be positive");
  const std::size_t dim = oracle.dim();
  std::set<std::vector<double>> taken;
  Rng rng(seed, Stream::kTrainInputs);
  PairedSamples pairs;
  pairs.inputs = draw_distinct(rng, count, dim, {-1.0, 1.0}, taken);
  pairs.targets.reserve(count);
  for (const Vector& x : pairs.inputs) pairs.targets.push_back(net_forward(oracle, x));

  std::string desc = "inputs ~ U[-1,1]^" + std::to_string(dim) + "; targets = oracle(x), no noise; oracle: depth " +
                     std::to_string(oracle.depth()) + " InvertibleNet";
  return EmbeddingPairSet{std::move(pairs), std::move(oracle), std::move(desc)};
}

SplitDataset split_pairs(const PairedSamples& pairs, std::size_t train_count) {
  if (train_count > pairs.size()) throw ConfigError("split_pairs: train_count exceeds pair count");
  SplitDataset out;
  out.train.inputs.assign(pairs.inputs.begin(), pairs.inputs.begin() + train_count);
  out.train.targets.assign(pairs.targets.begin(), pairs.targets.begin() + train_count);
  out.eval.inputs.assign(pairs.inputs.begin() + train_count, pairs.inputs.end());
  out.eval.targets.assign(pairs.targets.begin() + train_count, pairs.targets.end());
  return out;
}

double polynomial_invert_reference(double y) {
  // x^3 + x is strictly increasing and |x| <= |y| at the root.
  double lo = -std::abs(y);
  double hi = std::abs(y);
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid * mid * mid + mid < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace invnet
