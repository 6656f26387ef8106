#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "invnet/network.hpp"
#include "invnet/samples.hpp"

namespace invnet {

enum class FunctionKind { kSine, kPolynomial, kExponential };

std::string_view function_kind_name(FunctionKind kind);
// Accepts "sine", "polynomial", "exponential". Throws ConfigError otherwise.
FunctionKind parse_function_kind(std::string_view name);

struct Interval {
  double lo;
  double hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// sine: (-pi/2, pi/2); polynomial and exponential: [-1, 1].
Interval default_domain(FunctionKind kind);

// sin(x), x^3 + x or e^x.
double apply_function(FunctionKind kind, double x);

struct FunctionTaskSpec {
  FunctionKind kind = FunctionKind::kPolynomial;
  std::size_t dim = 4;
  std::optional<Interval> domain;  // default_domain(kind) when empty
  std::size_t train_count = 4096;
  std::size_t eval_count = 1024;
  std::uint64_t seed = 0;

  Interval effective_domain() const { return domain.value_or(default_domain(kind)); }
  // Rejects empty domains and domains where the target is not injective.
  void validate() const;
};

// Inputs i.i.d. uniform over the domain per coordinate; targets elementwise.
// Train and eval inputs come from separate streams and never coincide.
SplitDataset generate_function_dataset(const FunctionTaskSpec& spec);

struct EmbeddingPairSet {
  PairedSamples pairs;
  InvertibleNet oracle;
  std::string generator_spec;
};

// Settings of the hidden ground-truth net behind the synthetic embeddings.
NetConfig embedding_oracle_config(std::size_t dim, std::size_t depth);

// Stand-in for (image embedding, caption embedding) pairs: inputs uniform in
// [-1, 1]^dim, targets produced by a random hidden InvertibleNet.
EmbeddingPairSet generate_embedding_pairs(std::size_t dim, std::size_t count, std::size_t depth,
                                          std::uint64_t seed);
// Same construction with a caller-supplied oracle.
EmbeddingPairSet embedding_pairs_from_oracle(InvertibleNet oracle, std::size_t count,
                                             std::uint64_t seed);

// First train_count pairs form the train split, the rest the eval split.
SplitDataset split_pairs(const PairedSamples& pairs, std::size_t train_count);

// Real root of x^3 + x = y by bisection to 1e-12.
double polynomial_invert_reference(double y);

}  // namespace invnet
