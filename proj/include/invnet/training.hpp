#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "invnet/network.hpp"
#include "invnet/samples.hpp"

namespace invnet {

enum class OptimizerKind { kSgd, kAdam };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  // Stop after this many optimizer steps even mid-epoch; 0 disables the cap.
  std::size_t max_steps = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamParams adam;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string_view optimizer_name(OptimizerKind kind);

struct LossAndGrad {
  double loss;
  Vector grad;
};

// loss = mean((pred - target)^2), grad = 2 (pred - target) / n.
LossAndGrad mse_loss(const Vector& pred, const Vector& target);

// Updates l, u and bias of every block. k is never touched.
class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, const InvertibleNet& net);

  void step(InvertibleNet& net, const NetGradients& grads);
  std::size_t steps_taken() const noexcept { return steps_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  void update(std::span<double> params, std::span<const double> grads, Moments& state);

  OptimizerKind kind_;
  double lr_;
  AdamParams adam_;
  std::size_t steps_ = 0;
  double bias1_ = 1.0;  // 1 - beta1^t
  double bias2_ = 1.0;  // 1 - beta2^t
  // Per block: lower, upper, bias.
  std::vector<Moments> state_;
};

// Held-out metrics shared by training and stand-alone evaluation so both
// report bit-identical values.
struct EvalMetrics {
  double eval_mse = 0.0;            // learning error
  double eval_max_abs = 0.0;
  double inversion_error = 0.0;     // mean MSE of f^-1(y_true) vs x
  double inversion_max_abs = 0.0;
  double round_trip_error = 0.0;    // max ||f^-1(f(x)) - x||_inf
  double determinant_product = 1.0;
  std::vector<double> condition;    // per layer, ||W||_1 ||W^-1||_1
};

EvalMetrics evaluate(const InvertibleNet& net, const PairedSamples& split);

struct MetricsRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double train_mse = 0.0;  // mean training loss over the epoch's batches
  EvalMetrics eval;
  double det_drift = 0.0;  // |det - det_initial| / |det_initial|
};

struct FitResult {
  InvertibleNet net;
  std::vector<MetricsRecord> history;
};

using EpochCallback = std::function<void(const MetricsRecord&)>;

// Mini-batch training on mse_loss. Each epoch shuffles with an engine keyed
// by (seed, epoch). Throws NumericError naming epoch and batch when a loss
// goes non-finite.
FitResult fit(InvertibleNet net, const SplitDataset& data, const TrainConfig& cfg,
              const EpochCallback& on_epoch = {});

double evaluate_learning_error(const InvertibleNet& net, const PairedSamples& split);
double evaluate_inversion_error(const InvertibleNet& net, const PairedSamples& split);

// f^-1(y + eps), eps_i ~ N(0, sigma_sq) drawn from (seed, noise stream).
Vector noise_perturbed_inversion(const InvertibleNet& net, const Vector& y, double sigma_sq,
                                 std::uint64_t seed);

}  // namespace invnet
