// invnet: generate data, train, evaluate and invert LU-structured invertible nets.
//
// Exit codes: 0 ok, 2 config, 3 numeric abort, 4 singularity, 5 corrupt artifact.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invnet/config.hpp"
#include "invnet/error.hpp"
#include "invnet/io.hpp"
#include "invnet/rng.hpp"
#include "invnet/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace invnet;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kSingular = 4, kCorrupt = 5 };

// Variance applied by `eval` for the noisy-output inversion comparison.
constexpr double kReferenceNoiseVariance = 1e-4;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

RunConfig load_run_config(const GlobalOptions& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  const json j = json::parse(read_file(g.config), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: " + g.config + " is not valid JSON");
  RunConfig cfg = parse_run_config(j);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

fs::path ensure_out_dir(const GlobalOptions& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("--out: cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

json noisy_comparison(const InvertibleNet& net, const PairedSamples& split, std::uint64_t seed) {
  double noisy_sum = 0.0;
  for (std::size_t s = 0; s < split.size(); ++s) {
    const Vector pred = net_forward(net, split.inputs[s]);
    const Vector rec = noise_perturbed_inversion(net, pred, kReferenceNoiseVariance, derive_seed(seed, Stream::kNoise, s));
    noisy_sum += mean_squared_diff(rec, split.inputs[s]);
  }
  return {{"noise_variance", kReferenceNoiseVariance},
          {"noisy_output_inversion_error", noisy_sum / static_cast<double>(split.size())},
          {"inverse_lipschitz_bound", inverse_lipschitz_bound(net)}};
}

int cmd_gen_data(const GlobalOptions& g) {
  const RunConfig cfg = load_run_config(g);
  const fs::path dir = ensure_out_dir(g);
  GeneratedData gen = generate_task_data(cfg);
  save_dataset(dir / "dataset.bin", DatasetFile{gen.meta, gen.data});
  json summary = {{"dataset", (dir / "dataset.bin").string()},
                  {"train_count", gen.data.train.size()},
                  {"eval_count", gen.data.eval.size()}};
  if (gen.oracle) {
    save_checkpoint(dir / "oracle.ckpt.json",
                    Checkpoint{*gen.oracle, Provenance{cfg.seed, config_hash(to_json(cfg)), 0}});
    summary["oracle"] = (dir / "oracle.ckpt.json").string();
  }
  std::cout << summary.dump() << "\n";
  return kOk;
}

int cmd_train(const GlobalOptions& g, const std::string& data_path) {
  const RunConfig cfg = load_run_config(g);
  const DatasetFile dataset = load_dataset(data_path);
  const std::size_t dim = dataset.meta.at("dim").get<std::size_t>();
  if (dim != cfg.net.dim)
    throw ConfigError("task.dim: config says " + std::to_string(cfg.net.dim) + ", dataset has " + std::to_string(dim));
  const fs::path dir = ensure_out_dir(g);

  TrainConfig train = cfg.train;
  train.seed = cfg.seed;
  InvertibleNet net = InvertibleNet::initialize(cfg.net, cfg.seed);

  std::ofstream metrics(dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
  if (!metrics) throw ConfigError("--out: cannot write metrics.jsonl");
  const FitResult result = fit(std::move(net), dataset.data, train, [&](const MetricsRecord& r) {
    metrics << to_json(r).dump() << "\n";
    metrics.flush();
  });

  const MetricsRecord& last = result.history.back();
  save_checkpoint(dir / "checkpoint.json",
                  Checkpoint{result.net, Provenance{cfg.seed, config_hash(to_json(cfg)), last.epoch}});
  std::cout << json{{"epoch", last.epoch},
                    {"steps", last.steps},
                    {"eval_mse", last.eval.eval_mse},
                    {"inversion_error", last.eval.inversion_error},
                    {"round_trip_error", last.eval.round_trip_error}}
                   .dump()
            << "\n";
  return kOk;
}

int cmd_eval(const GlobalOptions& g, const std::string& ckpt_path, const std::string& data_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const DatasetFile dataset = load_dataset(data_path);
  const PairedSamples& split = dataset.data.eval.empty() ? dataset.data.train : dataset.data.eval;
  json out = to_json(evaluate(ckpt.net, split));
  out["schema_version"] = kFormatVersion;
  out["epoch"] = ckpt.provenance.epoch;
  out["noise"] = noisy_comparison(ckpt.net, split, g.seed.value_or(0));
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_invert(const GlobalOptions& g, const std::string& ckpt_path, const std::string& input_path,
               std::optional<double> noise_std, std::optional<double> noise_var) {
  if (noise_std && noise_var) throw ConfigError("--noise-std and --noise-var are mutually exclusive");
  double variance = 0.0;
  if (noise_std) {
    if (!(*noise_std >= 0.0)) throw ConfigError("--noise-std must be >= 0");
    variance = *noise_std * *noise_std;
  }
  if (noise_var) {
    if (!(*noise_var >= 0.0)) throw ConfigError("--noise-var must be >= 0");
    variance = *noise_var;
  }
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const std::vector<Vector> targets = load_vectors(input_path);
  const std::uint64_t seed = g.seed.value_or(0);
  std::vector<Vector> outputs;
  outputs.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].dim() != ckpt.net.dim())
      throw DimensionError("invert: target vector " + std::to_string(i), ckpt.net.dim(), targets[i].dim());
    outputs.push_back(noise_perturbed_inversion(ckpt.net, targets[i], variance, derive_seed(seed, Stream::kNoise, i)));
  }
  const fs::path dir = ensure_out_dir(g);
  save_vectors(dir / "inverted.vec", outputs);
  std::cout << json{{"output", (dir / "inverted.vec").string()}, {"count", outputs.size()}, {"noise_variance", variance}}
                   .dump()
            << "\n";
  return kOk;
}

int cmd_round_trip(const GlobalOptions& g, const std::string& ckpt_path, const std::string& data_path,
                   std::size_t count, double radius) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  std::vector<Vector> xs;
  if (!data_path.empty()) {
    const DatasetFile dataset = load_dataset(data_path);
    xs = dataset.data.eval.inputs;
    xs.insert(xs.end(), dataset.data.train.inputs.begin(), dataset.data.train.inputs.end());
  } else {
    if (count == 0) throw ConfigError("--count must be positive");
    Rng rng(g.seed.value_or(0), Stream::kProbe);
    for (std::size_t s = 0; s < count; ++s) {
      Vector x(ckpt.net.dim());
      for (double& v : x) v = rng.uniform(-radius, radius);
      xs.push_back(std::move(x));
    }
  }
  std::cout << json{{"count", xs.size()}, {"round_trip_error", round_trip_error(ckpt.net, xs)}}.dump() << "\n";
  return kOk;
}

int cmd_inspect(const std::string& ckpt_path, const std::string& data_path) {
  if (ckpt_path.empty() == data_path.empty()) throw ConfigError("inspect: give exactly one of --checkpoint or --data");
  json out;
  if (!ckpt_path.empty()) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const InvertibleNet& net = ckpt.net;
    json layers = json::array();
    for (const Block& b : net.blocks()) {
      layers.push_back({{"activation", std::string(activation_name(b.activation))},
                        {"determinant", determinant(b.linear.params())},
                        {"condition", condition_1norm(b.linear.params())}});
    }
    out = {{"dim", net.dim()},
           {"depth", net.depth()},
           {"determinant_product", determinant_product(net)},
           {"layers", layers},
           {"provenance",
            {{"seed", ckpt.provenance.seed}, {"config_hash", ckpt.provenance.config_hash}, {"epoch", ckpt.provenance.epoch}}}};
  } else {
    out = load_dataset(data_path).meta;
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LU-structured invertible neural networks"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration")->option_text("PATH");
  app.add_option("--seed", g.seed, "Seed for every random stream (overrides the config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  std::string data_path, ckpt_path, input_path;
  std::optional<double> noise_std, noise_var;
  std::size_t probe_count = 1000;
  double probe_radius = 10.0;

  auto* gen = app.add_subcommand("gen-data", "Write a dataset (and oracle checkpoint for embeddings)");
  auto* train = app.add_subcommand("train", "Fit a net; writes checkpoint.json and metrics.jsonl");
  train->add_option("--data", data_path, "Dataset file")->required();
  auto* eval = app.add_subcommand("eval", "Print held-out metrics as JSON");
  eval->add_option("--checkpoint", ckpt_path)->required();
  eval->add_option("--data", data_path)->required();
  auto* invert = app.add_subcommand("invert", "Apply the inverse net to target vectors");
  invert->add_option("--checkpoint", ckpt_path)->required();
  invert->add_option("--input", input_path, "Vector file of targets")->required();
  invert->add_option("--noise-std", noise_std, "Gaussian noise standard deviation added before inversion");
  invert->add_option("--noise-var", noise_var, "Gaussian noise variance added before inversion");
  auto* round_trip = app.add_subcommand("round-trip", "Max ||f^-1(f(x)) - x||_inf");
  round_trip->add_option("--checkpoint", ckpt_path)->required();
  round_trip->add_option("--data", data_path, "Use dataset inputs instead of random probes");
  round_trip->add_option("--count", probe_count, "Random probe count")->capture_default_str();
  round_trip->add_option("--radius", probe_radius, "Probes drawn from [-radius, radius]^n")->capture_default_str();
  auto* inspect = app.add_subcommand("inspect", "Summarize a checkpoint or dataset");
  inspect->add_option("--checkpoint", ckpt_path);
  inspect->add_option("--data", data_path);

  for (auto* sub : {gen, train, eval, invert, round_trip, inspect}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return cmd_gen_data(g);
    if (*train) return cmd_train(g, data_path);
    if (*eval) return cmd_eval(g, ckpt_path, data_path);
    if (*invert) return cmd_invert(g, ckpt_path, input_path, noise_std, noise_var);
    if (*round_trip) return cmd_round_trip(g, ckpt_path, data_path, probe_count, probe_radius);
    if (*inspect) return cmd_inspect(ckpt_path, data_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kNumeric;
  } catch (const SingularityError& e) {
    std::cerr << "singular weight: " << e.what() << "\n";
    return kSingular;
  } catch (const CorruptArtifactError& e) {
    std::cerr << "corrupt artifact: " << e.what() << "\n";
    return kCorrupt;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
