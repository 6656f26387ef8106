#pragma once

#include <vector>

#include "invnet/linalg.hpp"

namespace invnet {

// Parallel arrays of (input, target) pairs sharing one dimension.
struct PairedSamples {
  std::vector<Vector> inputs;
  std::vector<Vector> targets;

  std::size_t size() const noexcept { return inputs.size(); }
  bool empty() const noexcept { return inputs.empty(); }
  std::size_t dim() const noexcept { return inputs.empty() ? 0 : inputs.front().dim(); }

  // Throws DimensionError on ragged or mismatched data.
  void validate(std::size_t expected_dim) const;

  friend bool operator==(const PairedSamples&, const PairedSamples&) = default;
};

struct SplitDataset {
  PairedSamples train;
  PairedSamples eval;

  friend bool operator==(const SplitDataset&, const SplitDataset&) = default;
};

}  // namespace invnet
