#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "invnet/error.hpp"
#include "invnet/tasks.hpp"
#include "oracles.hpp"

using namespace invnet;

TEST_CASE("target functions") {
  CHECK(apply_function(FunctionKind::kSine, 0.0) == 0.0);
  CHECK(apply_function(FunctionKind::kPolynomial, 1.0) == 2.0);
  CHECK(apply_function(FunctionKind::kExponential, 0.0) == 1.0);
  CHECK(parse_function_kind("sine") == FunctionKind::kSine);
  CHECK_THROWS_AS(parse_function_kind("cosine"), ConfigError);
}

TEST_CASE("domains") {
  CHECK(default_domain(FunctionKind::kSine) == Interval{-std::numbers::pi / 2, std::numbers::pi / 2});
  CHECK(default_domain(FunctionKind::kPolynomial) == Interval{-1, 1});

  FunctionTaskSpec spec;
  spec.kind = FunctionKind::kSine;
  spec.domain = Interval{-2.0, 1.0};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.domain = Interval{0.5, 0.5};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.domain = Interval{-1.0, 1.0};
  CHECK_NOTHROW(spec.validate());
  spec.kind = FunctionKind::kExponential;
  spec.domain = Interval{0.0, 1000.0};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = FunctionTaskSpec{};
  spec.eval_count = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("function datasets") {
  for (auto kind : {FunctionKind::kSine, FunctionKind::kPolynomial, FunctionKind::kExponential}) {
    FunctionTaskSpec spec;
    spec.kind = kind;
    spec.train_count = 500;
    spec.eval_count = 200;
    spec.seed = 17;
    const SplitDataset a = generate_function_dataset(spec);
    CHECK(a.train.size() == 500);
    CHECK(a.eval.size() == 200);
    CHECK(a.train.dim() == 4);
    CHECK(generate_function_dataset(spec) == a);
    spec.seed = 18;
    CHECK(!(generate_function_dataset(spec) == a));

    const Interval d = default_domain(kind);
    for (const PairedSamples* split : {&a.train, &a.eval}) {
      for (std::size_t s = 0; s < split->size(); ++s) {
        for (std::size_t i = 0; i < 4; ++i) {
          const double x = split->inputs[s][i];
          REQUIRE(x >= d.lo);
          REQUIRE(x < d.hi);
          REQUIRE(split->targets[s][i] == apply_function(kind, x));
        }
      }
    }

    {  // targets strictly monotone per coordinate
      std::vector<std::pair<double, double>> pairs;
      for (std::size_t s = 0; s < a.train.size(); ++s) pairs.emplace_back(a.train.inputs[s][0], a.train.targets[s][0]);
      std::sort(pairs.begin(), pairs.end());
      for (std::size_t i = 1; i < pairs.size(); ++i)
        if (pairs[i].first > pairs[i - 1].first) REQUIRE(pairs[i].second > pairs[i - 1].second);
    }

    {  // train and eval inputs disjoint
      std::set<std::vector<double>> train;
      for (const Vector& x : a.train.inputs) train.insert(x.values());
      for (const Vector& x : a.eval.inputs) CHECK(train.count(x.values()) == 0);
    }
  }
}

TEST_CASE("embedding pairs") {
  const EmbeddingPairSet set = generate_embedding_pairs(16, 300, 3, 5);
  CHECK(set.pairs.size() == 300);
  CHECK(set.pairs.dim() == 16);
  CHECK(set.oracle.dim() == 16);
  CHECK(set.oracle.depth() == 3);
  CHECK(!set.generator_spec.empty());
  for (std::size_t s = 0; s < set.pairs.size(); ++s) {
    REQUIRE(net_forward(set.oracle, set.pairs.inputs[s]) == set.pairs.targets[s]);
    REQUIRE(norm_inf(set.pairs.inputs[s]) <= 1.0);
  }
  CHECK(generate_embedding_pairs(16, 300, 3, 5).pairs == set.pairs);
  CHECK_THROWS_AS(generate_embedding_pairs(1, 10, 3, 5), ConfigError);
  CHECK_THROWS_AS(generate_embedding_pairs(4, 10, 0, 5), ConfigError);

  SUBCASE("identity oracle adds its bias") {
    std::vector<Block> blocks;
    blocks.push_back(Block{InvertibleLinear(TriangularParams(3), Vector{0.5, -1, 2}), Identity{}});
    const EmbeddingPairSet id = embedding_pairs_from_oracle(InvertibleNet(std::move(blocks)), 20, 1);
    for (std::size_t s = 0; s < id.pairs.size(); ++s)
      CHECK(id.pairs.targets[s] == id.pairs.inputs[s] + Vector{0.5, -1, 2});
  }

  SUBCASE("oracle inverse recovers the inputs") {
    for (std::size_t s = 0; s < 50; ++s)
      CHECK(max_abs_diff(net_inverse(set.oracle, set.pairs.targets[s]), set.pairs.inputs[s]) <= 1e-9);
  }

  const SplitDataset split = split_pairs(set.pairs, 200);
  CHECK(split.train.size() == 200);
  CHECK(split.eval.size() == 100);
  CHECK(split.eval.inputs.front() == set.pairs.inputs[200]);
  CHECK_THROWS_AS(split_pairs(set.pairs, 301), ConfigError);
}

TEST_CASE("polynomial reference inverse") {
  CHECK(polynomial_invert_reference(0.0) == 0.0);
  CHECK(polynomial_invert_reference(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  // x^3 + x = 0.5: the real root of the depressed cubic, by Cardano.
  const double q = -0.5;
  const double cardano = std::cbrt(-q / 2 + std::sqrt(q * q / 4 + 1.0 / 27)) + std::cbrt(-q / 2 - std::sqrt(q * q / 4 + 1.0 / 27));
  CHECK(std::abs(polynomial_invert_reference(0.5) - cardano) <= 1e-12);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-3, 3);
    REQUIRE(std::abs(polynomial_invert_reference(x * x * x + x) - x) <= 1e-11);
  }
}
