#include "invnet/samples.hpp"

#include <string>

#include "invnet/error.hpp"

namespace invnet {

void PairedSamples::validate(std::size_t expected_dim) const {
  if (inputs.size() != targets.size())
    throw DimensionError("PairedSamples: input/target counts differ", inputs.size(), targets.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].dim() != expected_dim)
      throw DimensionError("PairedSamples input " + std::to_string(i), expected_dim, inputs[i].dim());
    if (targets[i].dim() != expected_dim)
      throw DimensionError("PairedSamples target " + std::to_string(i), expected_dim, targets[i].dim());
  }
}

}  // namespace invnet
