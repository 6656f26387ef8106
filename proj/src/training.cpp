#include "invnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "invnet/error.hpp"
#include "invnet/rng.hpp"

namespace invnet {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("train.learning_rate must be finite and >= 0");
  if (epochs == 0) throw ConfigError("train.epochs must be positive");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (optimizer == OptimizerKind::kAdam) {
    if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0)) throw ConfigError("train.beta1 must lie in (0, 1)");
    if (!(adam.beta2 > 0.0 && adam.beta2 < 1.0)) throw ConfigError("train.beta2 must lie in (0, 1)");
    if (!(adam.epsilon > 0.0)) throw ConfigError("train.epsilon must be positive");
  }
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

LossAndGrad mse_loss(const Vector& pred, const Vector& target) {
  if (pred.dim() != target.dim()) throw DimensionError("mse_loss", target.dim(), pred.dim());
  const double n = static_cast<double>(pred.dim());
  LossAndGrad out{0.0, Vector(pred.dim())};
  for (std::size_t i = 0; i < pred.dim(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = 2.0 * d / n;
  }
  out.loss /= n;
  return out;
}

Optimizer::Optimizer(const TrainConfig& cfg, const InvertibleNet& net)
    : kind_(cfg.optimizer), lr_(cfg.learning_rate), adam_(cfg.adam) {
  if (kind_ == OptimizerKind::kAdam) {
    const std::size_t tri = TriangularParams::triangle_size(net.dim());
    state_.reserve(3 * net.depth());
    for (std::size_t b = 0; b < net.depth(); ++b) {
      for (std::size_t size : {tri, tri, net.dim()})
        state_.push_back(Moments{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)});
    }
  }
}

void Optimizer::update(std::span<double> params, std::span<const double> grads, Moments& state) {
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grads[i];
    return;
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = adam_.beta1 * state.m[i] + (1.0 - adam_.beta1) * grads[i];
    state.v[i] = adam_.beta2 * state.v[i] + (1.0 - adam_.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bias1_;
    const double v_hat = state.v[i] / bias2_;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + adam_.epsilon);
  }
}

void Optimizer::step(InvertibleNet& net, const NetGradients& grads) {
  if (grads.blocks.size() != net.depth())
    throw DimensionError("Optimizer::step gradient blocks", net.depth(), grads.blocks.size());
  ++steps_;
  if (kind_ == OptimizerKind::kAdam) {
    bias1_ = 1.0 - std::pow(adam_.beta1, static_cast<double>(steps_));
    bias2_ = 1.0 - std::pow(adam_.beta2, static_cast<double>(steps_));
  }
  Moments unused;
  for (std::size_t b = 0; b < net.depth(); ++b) {
    Block& block = net.mutable_block(b);
    const LinearGrads& g = grads.blocks[b];
    auto slot = [&](std::size_t k) -> Moments& {
      return kind_ == OptimizerKind::kAdam ? state_[3 * b + k] : unused;
    };
    update(block.linear.params().lower_mut(), g.d_lower, slot(0));
    update(block.linear.params().upper_mut(), g.d_upper, slot(1));
    update(block.linear.bias_mut(), g.d_bias.span(), slot(2));
  }
}

EvalMetrics evaluate(const InvertibleNet& net, const PairedSamples& split) {
  if (split.empty()) throw ConfigError("evaluate: evaluation split is empty");
  split.validate(net.dim());
  EvalMetrics out;
  double learn_sum = 0.0;
  double inv_sum = 0.0;
  for (std::size_t s = 0; s < split.size(); ++s) {
    const Vector& x = split.inputs[s];
    const Vector& y = split.targets[s];
    const Vector pred = net_forward(net, x);
    learn_sum += mean_squared_diff(pred, y);
    out.eval_max_abs = std::max(out.eval_max_abs, max_abs_diff(pred, y));

    const Vector from_target = net_inverse(net, y);
    inv_sum += mean_squared_diff(from_target, x);
    out.inversion_max_abs = std::max(out.inversion_max_abs, max_abs_diff(from_target, x));

    out.round_trip_error = std::max(out.round_trip_error, max_abs_diff(net_inverse(net, pred), x));
  }
  const double count = static_cast<double>(split.size());
  out.eval_mse = learn_sum / count;
  out.inversion_error = inv_sum / count;
  out.determinant_product = determinant_product(net);
  out.condition = condition_estimates(net);
  return out;
}

namespace {

void accumulate(NetGradients& acc, const NetGradients& g) {
  if (acc.blocks.empty()) {
    acc = g;
    return;
  }
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    LinearGrads& a = acc.blocks[b];
    const LinearGrads& s = g.blocks[b];
    for (std::size_t i = 0; i < a.d_lower.size(); ++i) a.d_lower[i] += s.d_lower[i];
    for (std::size_t i = 0; i < a.d_upper.size(); ++i) a.d_upper[i] += s.d_upper[i];
    for (std::size_t i = 0; i < a.d_bias.dim(); ++i) a.d_bias[i] += s.d_bias[i];
  }
}

void scale(NetGradients& g, double factor) {
  for (LinearGrads& b : g.blocks) {
    for (double& v : b.d_lower) v *= factor;
    for (double& v : b.d_upper) v *= factor;
    for (double& v : b.d_bias) v *= factor;
  }
}

}  // namespace

FitResult fit(InvertibleNet net, const SplitDataset& data, const TrainConfig& cfg,
              const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.train.empty()) throw ConfigError("fit: training split is empty");
  data.train.validate(net.dim());
  data.eval.validate(net.dim());
  const PairedSamples& eval_split = data.eval.empty() ? data.train : data.eval;

  const double det_initial = determinant_product(net);
  Optimizer optimizer(cfg, net);
  std::vector<std::size_t> order(data.train.size());
  FitResult result{std::move(net), {}};
  InvertibleNet& model = result.net;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(cfg.seed, Stream::kShuffle, epoch);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    bool capped = false;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      NetGradients acc;
      double batch_loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const std::size_t idx = order[s];
        ForwardResult fwd = net_forward(model, data.train.inputs[idx], true);
        const LossAndGrad lg = mse_loss(fwd.output, data.train.targets[idx]);
        batch_loss += lg.loss;
        accumulate(acc, net_backward(model, *fwd.trace, lg.grad));
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch));
      }
      scale(acc, 1.0 / static_cast<double>(stop - start));
      optimizer.step(model, acc);
      loss_sum += batch_loss;
      seen += stop - start;
      if (cfg.max_steps != 0 && optimizer.steps_taken() >= cfg.max_steps) {
        capped = true;
        break;
      }
    }

    MetricsRecord record;
    record.epoch = epoch;
    record.steps = optimizer.steps_taken();
    record.train_mse = loss_sum / static_cast<double>(seen);
    record.eval = evaluate(model, eval_split);
    record.det_drift = std::abs(record.eval.determinant_product - det_initial) / std::abs(det_initial);
    if (on_epoch) on_epoch(record);
    result.history.push_back(std::move(record));
    if (capped) break;
  }
  return result;
}

double evaluate_learning_error(const InvertibleNet& net, const PairedSamples& split) {
  if (split.empty()) throw ConfigError("evaluate_learning_error: split is empty");
  double sum = 0.0;
  for (std::size_t s = 0; s < split.size(); ++s)
    sum += mean_squared_diff(net_forward(net, split.inputs[s]), split.targets[s]);
  return sum / static_cast<double>(split.size());
}

double evaluate_inversion_error(const InvertibleNet& net, const PairedSamples& split) {
  if (split.empty()) throw ConfigError("evaluate_inversion_error: split is empty");
  double sum = 0.0;
  for (std::size_t s = 0; s < split.size(); ++s)
    sum += mean_squared_diff(net_inverse(net, split.targets[s]), split.inputs[s]);
  return sum / static_cast<double>(split.size());
}

Vector noise_perturbed_inversion(const InvertibleNet& net, const Vector& y, double sigma_sq,
                                 std::uint64_t seed) {
  if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq))
    throw ConfigError("noise_perturbed_inversion: variance must be finite and >= 0");
  if (sigma_sq == 0.0) return net_inverse(net, y);
  const double std_dev = std::sqrt(sigma_sq);
  Rng rng(seed, Stream::kNoise);
  Vector noisy = y;
  for (double& v : noisy) v += std_dev * rng.normal();
  return net_inverse(net, noisy);
}

}  // namespace invnet
