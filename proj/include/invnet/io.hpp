#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invnet/network.hpp"
#include "invnet/samples.hpp"
#include "invnet/training.hpp"

namespace invnet {

// Version shared by checkpoints, dataset/vector files and the metrics schema.
inline constexpr int kFormatVersion = 1;

// Doubles as hex of their little-endian bytes, 16 characters per value.
std::string encode_hex_doubles(std::span<const double> values);
std::vector<double> decode_hex_doubles(std::string_view hex, std::string_view field);

// 64-bit FNV-1a over the compact dump of a JSON value, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::uint64_t epoch = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Checkpoint {
  InvertibleNet net;
  Provenance provenance;
};

std::string checkpoint_to_string(const Checkpoint& ckpt);
// Throws CorruptArtifactError naming the offending field or version, or
// SingularityError naming the first degenerate k.
Checkpoint checkpoint_from_string(std::string_view text);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// One JSON header line, then per record the input row and the target row as
// little-endian doubles; train records precede eval records.
struct DatasetFile {
  nlohmann::json meta;  // must carry dim, train_count, eval_count
  SplitDataset data;
};

void save_dataset(const std::filesystem::path& path, const DatasetFile& file);
DatasetFile load_dataset(const std::filesystem::path& path);

// One JSON header line ({"format","format_version","dim","count"}) then
// count rows of dim little-endian doubles.
void save_vectors(const std::filesystem::path& path, std::span<const Vector> vectors);
std::vector<Vector> load_vectors(const std::filesystem::path& path);

nlohmann::json to_json(const EvalMetrics& m);
nlohmann::json to_json(const MetricsRecord& r);
// Single-line JSON objects, one per record, each tagged with schema_version.
std::string metrics_jsonl(std::span<const MetricsRecord> records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace invnet
