#include "invnet/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "invnet/error.hpp"

namespace invnet {

using nlohmann::json;

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_le_double(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

double read_le_double(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

// Splits "header\nbinary" and parses the header.
std::pair<json, std::string_view> split_header(std::string_view bytes, std::string_view what) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos)
    throw CorruptArtifactError(std::string(what) + ": missing header line");
  json meta = json::parse(bytes.substr(0, newline), nullptr, false);
  if (meta.is_discarded() || !meta.is_object())
    throw CorruptArtifactError(std::string(what) + ": header is not a JSON object");
  return {std::move(meta), bytes.substr(newline + 1)};
}

template <class T>
T require_field(const json& obj, const std::string& key, std::string_view what) {
  if (!obj.contains(key)) throw CorruptArtifactError(std::string(what) + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw CorruptArtifactError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

void check_format(const json& meta, std::string_view expected, std::string_view what) {
  const auto format = require_field<std::string>(meta, "format", what);
  if (format != expected)
    throw CorruptArtifactError(std::string(what) + ": format '" + format + "' is not '" + std::string(expected) + "'");
  const auto version = require_field<int>(meta, "format_version", what);
  if (version != kFormatVersion)
    throw CorruptArtifactError(std::string(what) + ": format_version " + std::to_string(version) +
                               " not recognized (expected " + std::to_string(kFormatVersion) + ")");
}

}  // namespace

std::string encode_hex_doubles(std::span<const double> values) {
  std::string out;
  out.reserve(values.size() * 16);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      const auto byte = static_cast<unsigned>((bits >> (8 * b)) & 0xffu);
      out.push_back(kHexDigits[byte >> 4]);
      out.push_back(kHexDigits[byte & 0xfu]);
    }
  }
  return out;
}

std::vector<double> decode_hex_doubles(std::string_view hex, std::string_view field) {
  if (hex.size() % 16 != 0)
    throw CorruptArtifactError(std::string(field) + ": hex length " + std::to_string(hex.size()) +
                               " is not a multiple of 16");
  std::vector<double> out(hex.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      const int hi = hex_value(hex[16 * i + 2 * b]);
      const int lo = hex_value(hex[16 * i + 2 * b + 1]);
      if (hi < 0 || lo < 0) throw CorruptArtifactError(std::string(field) + ": invalid hex digit");
      bits |= static_cast<std::uint64_t>(hi * 16 + lo) << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHexDigits[h & 0xfu];
    h >>= 4;
  }
  return out;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  const InvertibleNet& net = ckpt.net;
  const auto& blocks = net.blocks();

  // Inner blocks share one activation; the last may differ.
  const Activation& inner = blocks.front().activation;
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    if (!(blocks[b].activation == inner))
      throw ConfigError("checkpoint: inner blocks must share one activation");
  }
  const Activation& last = blocks.back().activation;
  if (blocks.size() > 1 && std::holds_alternative<LeakyReLU>(last) && !(last == inner))
    throw ConfigError("checkpoint: a leaky final activation must match the inner slope");

  json topology;
  topology["dim"] = net.dim();
  topology["depth"] = net.depth();
  const Activation& shared = blocks.size() > 1 ? inner : last;
  topology["activation"] = std::string(activation_name(shared));
  if (const auto* leaky = std::get_if<LeakyReLU>(&shared)) {
    const double alpha = leaky->alpha();
    topology["alpha"] = encode_hex_doubles(std::span<const double>(&alpha, 1));
  }
  topology["final_activation"] = std::string(activation_name(last));

  json block_array = json::array();
  for (const Block& b : blocks) {
    const TriangularParams& p = b.linear.params();
    block_array.push_back({{"l", encode_hex_doubles(p.lower())},
                           {"u", encode_hex_doubles(p.upper())},
                           {"k", encode_hex_doubles(p.diagonal())},
                           {"bias", encode_hex_doubles(b.linear.bias().span())}});
  }

  json doc;
  doc["format"] = "invnet-checkpoint";
  doc["format_version"] = kFormatVersion;
  doc["topology"] = std::move(topology);
  doc["blocks"] = std::move(block_array);
  doc["provenance"] = {{"seed", ckpt.provenance.seed},
                       {"config_hash", ckpt.provenance.config_hash},
                       {"epoch", ckpt.provenance.epoch}};
  return doc.dump(2) + "\n";
}

Checkpoint checkpoint_from_string(std::string_view text) {
  constexpr std::string_view what = "checkpoint";
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw CorruptArtifactError("checkpoint: not a JSON object");
  check_format(doc, "invnet-checkpoint", what);

  const json topology = require_field<json>(doc, "topology", what);
  const auto dim = require_field<std::size_t>(topology, "dim", "checkpoint.topology");
  const auto depth = require_field<std::size_t>(topology, "depth", "checkpoint.topology");
  if (dim == 0 || depth == 0) throw CorruptArtifactError("checkpoint.topology: dim and depth must be positive");

  auto make_activation = [&](const std::string& name) -> Activation {
    if (name == "identity") return Identity{};
    if (name == "leaky_relu") {
      const auto alpha = decode_hex_doubles(require_field<std::string>(topology, "alpha", "checkpoint.topology"),
                                            "checkpoint.topology.alpha");
      if (alpha.size() != 1) throw CorruptArtifactError("checkpoint.topology.alpha: expected one value");
      try {
        return LeakyReLU(alpha.front());
      } catch (const ConfigError& e) {
        throw CorruptArtifactError(std::string("checkpoint.topology.alpha: ") + e.what());
      }
    }
    throw CorruptArtifactError("checkpoint.topology: unknown activation '" + name + "'");
  };
  const Activation inner = make_activation(require_field<std::string>(topology, "activation", "checkpoint.topology"));
  const Activation last =
      make_activation(require_field<std::string>(topology, "final_activation", "checkpoint.topology"));

  const json blocks_json = require_field<json>(doc, "blocks", what);
  if (!blocks_json.is_array() || blocks_json.size() != depth)
    throw CorruptArtifactError("checkpoint.blocks: expected " + std::to_string(depth) + " blocks");

  const std::size_t tri = TriangularParams::triangle_size(dim);
  std::vector<Block> blocks;
  blocks.reserve(depth);
  for (std::size_t b = 0; b < depth; ++b) {
    const std::string prefix = "checkpoint.blocks[" + std::to_string(b) + "]";
    const json& bj = blocks_json[b];
    auto read = [&](const char* key, std::size_t expected) {
      const std::string field = prefix + "." + key;
      auto values = decode_hex_doubles(require_field<std::string>(bj, key, prefix), field);
      if (values.size() != expected)
        throw CorruptArtifactError(field + ": expected " + std::to_string(expected) + " values, got " +
                                   std::to_string(values.size()));
      return values;
    };
    auto lower = read("l", tri);
    auto upper = read("u", tri);
    auto diag = read("k", dim);
    auto bias = read("bias", dim);
    try {
      TriangularParams params(dim, std::move(lower), std::move(upper), std::move(diag));
      blocks.push_back(Block{InvertibleLinear(std::move(params), Vector(std::move(bias))),
                             b + 1 == depth ? last : inner});
    } catch (const SingularityError& e) {
      throw SingularityError(prefix + ".k[" + std::to_string(e.index()) + "] is zero or below 1e-12", e.index());
    }
  }

  const json prov = require_field<json>(doc, "provenance", what);
  Provenance provenance{require_field<std::uint64_t>(prov, "seed", "checkpoint.provenance"),
                        require_field<std::string>(prov, "config_hash", "checkpoint.provenance"),
                        require_field<std::uint64_t>(prov, "epoch", "checkpoint.provenance")};
  return Checkpoint{InvertibleNet(std::move(blocks)), std::move(provenance)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, checkpoint_to_string(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ConfigError& e) {
    throw CorruptArtifactError(e.what());
  }
  return checkpoint_from_string(text);
}

void save_dataset(const std::filesystem::path& path, const DatasetFile& file) {
  const std::size_t dim = file.meta.at("dim").get<std::size_t>();
  file.data.train.validate(dim);
  file.data.eval.validate(dim);
  json meta = file.meta;
  meta["format"] = "invnet-dataset";
  meta["format_version"] = kFormatVersion;
  meta["train_count"] = file.data.train.size();
  meta["eval_count"] = file.data.eval.size();

  std::string bytes = meta.dump() + "\n";
  bytes.reserve(bytes.size() + (file.data.train.size() + file.data.eval.size()) * dim * 16);
  for (const PairedSamples* split : {&file.data.train, &file.data.eval}) {
    for (std::size_t s = 0; s < split->size(); ++s) {
      for (double v : split->inputs[s]) append_le_double(bytes, v);
      for (double v : split->targets[s]) append_le_double(bytes, v);
    }
  }
  write_file(path, bytes);
}

DatasetFile load_dataset(const std::filesystem::path& path) {
  constexpr std::string_view what = "dataset";
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const ConfigError& e) {
    throw CorruptArtifactError(e.what());
  }
  auto [meta, body] = split_header(bytes, what);
  check_format(meta, "invnet-dataset", what);
  const auto dim = require_field<std::size_t>(meta, "dim", what);
  const auto train_count = require_field<std::size_t>(meta, "train_count", what);
  const auto eval_count = require_field<std::size_t>(meta, "eval_count", what);
  if (dim == 0) throw CorruptArtifactError("dataset: dim must be positive");
  const std::size_t expected = (train_count + eval_count) * dim * 2 * 8;
  if (body.size() != expected)
    throw CorruptArtifactError("dataset: body has " + std::to_string(body.size()) + " bytes, header implies " +
                               std::to_string(expected));

  DatasetFile file{std::move(meta), {}};
  const char* p = body.data();
  auto read_row = [&] {
    Vector v(dim);
    for (double& x : v) {
      x = read_le_double(p);
      p += 8;
    }
    return v;
  };
  for (auto [split, count] : {std::pair{&file.data.train, train_count}, std::pair{&file.data.eval, eval_count}}) {
    split->inputs.reserve(count);
    split->targets.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      split->inputs.push_back(read_row());
      split->targets.push_back(read_row());
    }
  }
  return file;
}

void save_vectors(const std::filesystem::path& path, std::span<const Vector> vectors) {
  if (vectors.empty()) throw ConfigError("save_vectors: nothing to write");
  const std::size_t dim = vectors.front().dim();
  json meta = {{"format", "invnet-vectors"}, {"format_version", kFormatVersion}, {"dim", dim},
               {"count", vectors.size()}};
  std::string bytes = meta.dump() + "\n";
  for (const Vector& v : vectors) {
    if (v.dim() != dim) throw DimensionError("save_vectors", dim, v.dim());
    for (double x : v) append_le_double(bytes, x);
  }
  write_file(path, bytes);
}

std::vector<Vector> load_vectors(const std::filesystem::path& path) {
  constexpr std::string_view what = "vector file";
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const ConfigError& e) {
    throw CorruptArtifactError(e.what());
  }
  auto [meta, body] = split_header(bytes, what);
  check_format(meta, "invnet-vectors", what);
  const auto dim = require_field<std::size_t>(meta, "dim", what);
  const auto count = require_field<std::size_t>(meta, "count", what);
  if (dim == 0) throw CorruptArtifactError("vector file: dim must be positive");
  if (body.size() != dim * count * 8)
    throw CorruptArtifactError("vector file: body has " + std::to_string(body.size()) + " bytes, header implies " +
                               std::to_string(dim * count * 8));
  std::vector<Vector> out;
  out.reserve(count);
  const char* p = body.data();
  for (std::size_t s = 0; s < count; ++s) {
    Vector v(dim);
    for (double& x : v) {
      x = read_le_double(p);
      p += 8;
    }
    out.push_back(std::move(v));
  }
  return out;
}

json to_json(const EvalMetrics& m) {
  return {{"eval_mse", m.eval_mse},
          {"eval_max_abs", m.eval_max_abs},
          {"inversion_error", m.inversion_error},
          {"inversion_max_abs", m.inversion_max_abs},
          {"round_trip_error", m.round_trip_error},
          {"determinant_product", m.determinant_product},
          {"condition", m.condition}};
}

json to_json(const MetricsRecord& r) {
  json j = to_json(r.eval);
  j["schema_version"] = kFormatVersion;
  j["epoch"] = r.epoch;
  j["steps"] = r.steps;
  j["train_mse"] = r.train_mse;
  j["det_drift"] = r.det_drift;
  return j;
}

std::string metrics_jsonl(std::span<const MetricsRecord> records) {
  std::string out;
  for (const MetricsRecord& r : records) out += to_json(r).dump() + "\n";
  return out;
}

}  // namespace invnet
