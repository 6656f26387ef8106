#include "invnet/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>

#include "invnet/error.hpp"

namespace invnet {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(prefix + "." + key + ": unknown field");
  }
}

template <class T>
void read(const json& obj, const std::string& prefix, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + "." + key + ": wrong type");
  }
}

FinalActivation parse_final(const std::string& name) {
  if (name == "identity") return FinalActivation::kIdentity;
  if (name == "leaky_relu") return FinalActivation::kLeakyReLU;
  throw ConfigError("net.final_activation: expected 'identity' or 'leaky_relu', got '" + name + "'");
}

}  // namespace

RunConfig default_run_config(std::string_view task_kind) {
  RunConfig cfg;
  cfg.train.learning_rate = 1e-3;
  cfg.train.batch_size = 64;
  cfg.train.optimizer = OptimizerKind::kAdam;

  if (task_kind == "embedding") {
    EmbeddingTaskSpec spec;
    cfg.task = spec;
    cfg.net.dim = spec.dim;
    cfg.net.depth = 3;
    cfg.net.alpha = LeakyReLU::kDefaultAlpha;
    cfg.train.epochs = 60;
    cfg.train.max_steps = 0;
    return cfg;
  }

  FunctionTaskSpec spec;
  spec.kind = parse_function_kind(task_kind);
  cfg.task = spec;
  cfg.net.dim = spec.dim;
  cfg.net.depth = 3;
  cfg.train.epochs = 312;  // 64 batches per epoch over 4096 samples
  cfg.train.max_steps = 20000;
  switch (spec.kind) {
    // With k = 1 every block preserves volume and these maps underfit badly.
    // Negative k on the leaky blocks lets the alpha slopes compose usefully.
    case FunctionKind::kSine:
      cfg.net.alpha = 0.3;
      cfg.net.diagonals = {-1.0, -1.0, 1.0};
      break;
    case FunctionKind::kPolynomial:
      cfg.net.alpha = 0.4;
      cfg.net.diagonals = {-1.8, -1.8, 1.8};
      break;
    case FunctionKind::kExponential:
      cfg.net.alpha = 0.45;
      cfg.net.diagonals = {1.4};
      break;
  }
  return cfg;
}

RunConfig parse_run_config(const json& j) {
  reject_unknown(j, "config", {"task", "net", "train", "seed"});
  if (!j.contains("task")) throw ConfigError("config.task: missing");
  const json& tj = j.at("task");
  if (!tj.is_object() || !tj.contains("kind")) throw ConfigError("task.kind: missing");
  std::string kind;
  read(tj, "task", "kind", kind);

  RunConfig cfg = default_run_config(kind);
  read(j, "config", "seed", cfg.seed);

  if (auto* fn = std::get_if<FunctionTaskSpec>(&cfg.task)) {
    reject_unknown(tj, "task", {"kind", "dim", "train_count", "eval_count", "domain"});
    read(tj, "task", "dim", fn->dim);
    read(tj, "task", "train_count", fn->train_count);
    read(tj, "task", "eval_count", fn->eval_count);
    if (tj.contains("domain")) {
      std::vector<double> d;
      read(tj, "task", "domain", d);
      if (d.size() != 2) throw ConfigError("task.domain: expected [lo, hi]");
      fn->domain = Interval{d[0], d[1]};
    }
    fn->validate();
  } else {
    auto& em = std::get<EmbeddingTaskSpec>(cfg.task);
    reject_unknown(tj, "task", {"kind", "dim", "train_count", "eval_count", "oracle_depth"});
    read(tj, "task", "dim", em.dim);
    read(tj, "task", "train_count", em.train_count);
    read(tj, "task", "eval_count", em.eval_count);
    read(tj, "task", "oracle_depth", em.oracle_depth);
    if (em.dim < 2) throw ConfigError("task.dim: embedding dim must be at least 2");
    if (em.train_count == 0) throw ConfigError("task.train_count must be positive");
    if (em.eval_count == 0) throw ConfigError("task.eval_count must be positive");
    if (em.oracle_depth == 0) throw ConfigError("task.oracle_depth must be at least 1");
  }
  cfg.net.dim = task_dim(cfg.task);

  if (j.contains("net")) {
    const json& nj = j.at("net");
    reject_unknown(nj, "net", {"depth", "alpha", "final_activation", "diagonals", "init_scale", "bias_scale"});
    read(nj, "net", "depth", cfg.net.depth);
    read(nj, "net", "alpha", cfg.net.alpha);
    if (nj.contains("final_activation")) {
      std::string name;
      read(nj, "net", "final_activation", name);
      cfg.net.final_activation = parse_final(name);
    }
    read(nj, "net", "diagonals", cfg.net.diagonals);
    read(nj, "net", "init_scale", cfg.net.init_scale);
    read(nj, "net", "bias_scale", cfg.net.bias_scale);
  }
  cfg.net.validate();

  if (j.contains("train")) {
    const json& rj = j.at("train");
    reject_unknown(rj, "train", {"optimizer", "learning_rate", "epochs", "batch_size", "max_steps", "beta1",
                                 "beta2", "epsilon"});
    if (rj.contains("optimizer")) {
      std::string name;
      read(rj, "train", "optimizer", name);
      if (name == "sgd")
        cfg.train.optimizer = OptimizerKind::kSgd;
      else if (name == "adam")
        cfg.train.optimizer = OptimizerKind::kAdam;
      else
        throw ConfigError("train.optimizer: expected 'sgd' or 'adam', got '" + name + "'");
    }
    read(rj, "train", "learning_rate", cfg.train.learning_rate);
    read(rj, "train", "epochs", cfg.train.epochs);
    read(rj, "train", "batch_size", cfg.train.batch_size);
    read(rj, "train", "max_steps", cfg.train.max_steps);
    read(rj, "train", "beta1", cfg.train.adam.beta1);
    read(rj, "train", "beta2", cfg.train.adam.beta2);
    read(rj, "train", "epsilon", cfg.train.adam.epsilon);
  }
  cfg.train.validate();
  return cfg;
}

std::string task_kind_name(const TaskSpec& task) {
  return std::visit(overloaded{[](const FunctionTaskSpec& f) { return std::string(function_kind_name(f.kind)); },
                               [](const EmbeddingTaskSpec&) { return std::string("embedding"); }},
                    task);
}

std::size_t task_dim(const TaskSpec& task) {
  return std::visit([](const auto& t) { return t.dim; }, task);
}

json to_json(const RunConfig& cfg) {
  json task;
  task["kind"] = task_kind_name(cfg.task);
  std::visit(overloaded{[&](const FunctionTaskSpec& f) {
                          const Interval d = f.effective_domain();
                          task["dim"] = f.dim;
                          task["train_count"] = f.train_count;
                          task["eval_count"] = f.eval_count;
                          task["domain"] = {d.lo, d.hi};
                        },
                        [&](const EmbeddingTaskSpec& e) {
                          task["dim"] = e.dim;
                          task["train_count"] = e.train_count;
                          task["eval_count"] = e.eval_count;
                          task["oracle_depth"] = e.oracle_depth;
                        }},
             cfg.task);
  json net = {{"depth", cfg.net.depth},
              {"alpha", cfg.net.alpha},
              {"final_activation",
               cfg.net.final_activation == FinalActivation::kIdentity ? "identity" : "leaky_relu"},
              {"diagonals", cfg.net.diagonals},
              {"init_scale", cfg.net.init_scale},
              {"bias_scale", cfg.net.bias_scale}};
  json train = {{"optimizer", std::string(optimizer_name(cfg.train.optimizer))},
                {"learning_rate", cfg.train.learning_rate},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"max_steps", cfg.train.max_steps},
                {"beta1", cfg.train.adam.beta1},
                {"beta2", cfg.train.adam.beta2},
                {"epsilon", cfg.train.adam.epsilon}};
  return {{"task", task}, {"net", net}, {"train", train}, {"seed", cfg.seed}};
}

GeneratedData generate_task_data(const RunConfig& cfg) {
  GeneratedData out;
  out.meta = {{"kind", task_kind_name(cfg.task)}, {"dim", task_dim(cfg.task)}, {"seed", cfg.seed}};
  if (const auto* fn = std::get_if<FunctionTaskSpec>(&cfg.task)) {
    FunctionTaskSpec spec = *fn;
    spec.seed = cfg.seed;
    out.data = generate_function_dataset(spec);
    const Interval d = spec.effective_domain();
    out.meta["domain"] = {d.lo, d.hi};
  } else {
    const auto& em = std::get<EmbeddingTaskSpec>(cfg.task);
    EmbeddingPairSet set =
        generate_embedding_pairs(em.dim, em.train_count + em.eval_count, em.oracle_depth, cfg.seed);
    out.data = split_pairs(set.pairs, em.train_count);
    out.meta["oracle_depth"] = em.oracle_depth;
    out.meta["generator"] = set.generator_spec;
    out.oracle = std::move(set.oracle);
  }
  return out;
}

}  // namespace invnet
