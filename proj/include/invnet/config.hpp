#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include <json.hpp>

#include "invnet/network.hpp"
#include "invnet/tasks.hpp"
#include "invnet/training.hpp"

namespace invnet {

struct EmbeddingTaskSpec {
  std::size_t dim = 16;
  std::size_t train_count = 10000;
  std::size_t eval_count = 1000;
  std::size_t oracle_depth = 3;
};

using TaskSpec = std::variant<FunctionTaskSpec, EmbeddingTaskSpec>;

// Everything a run needs besides file paths. One seed feeds every stream
// (data, init, shuffle), each through its own derived engine.
struct RunConfig {
  TaskSpec task;
  NetConfig net;
  TrainConfig train;
  std::uint64_t seed = 0;
};

// Desk-scale defaults per task: dim 4 / depth 3 for the function tasks, the
// 16-dimensional embedding stand-in otherwise.
RunConfig default_run_config(std::string_view task_kind);

// Starts from default_run_config(task.kind) and applies the given fields.
// Unknown keys and bad values raise ConfigError naming the field.
RunConfig parse_run_config(const nlohmann::json& j);

// Canonical JSON form (every field explicit); hashed into checkpoints.
nlohmann::json to_json(const RunConfig& cfg);

std::string task_kind_name(const TaskSpec& task);
std::size_t task_dim(const TaskSpec& task);

// Generates the task's data with cfg.seed. The oracle is set for embeddings.
struct GeneratedData {
  SplitDataset data;
  nlohmann::json meta;
  std::optional<InvertibleNet> oracle;
};
GeneratedData generate_task_data(const RunConfig& cfg);

}  // namespace invnet
