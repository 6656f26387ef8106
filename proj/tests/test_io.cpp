#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "invnet/error.hpp"
#include "invnet/io.hpp"
#include "oracles.hpp"

using namespace invnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "invnet_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string error_of(std::string_view text) {
  try {
    checkpoint_from_string(text);
  } catch (const CorruptArtifactError& e) {
    return e.what();
  }
  return "";
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("hex doubles") {
  CHECK(encode_hex_doubles(std::vector<double>{1.0}) == "000000000000f03f");
  CHECK(encode_hex_doubles(std::vector<double>{-2.0}) == "00000000000000c0");
  CHECK(encode_hex_doubles(std::vector<double>{}).empty());

  const std::vector<double> values{0.0, -0.0, 0.1, -1e-300, 6.02e23, std::numeric_limits<double>::denorm_min()};
  const auto back = decode_hex_doubles(encode_hex_doubles(values), "x");
  REQUIRE(back.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(std::memcmp(&back[i], &values[i], sizeof(double)) == 0);

  CHECK_THROWS_AS(decode_hex_doubles("000000000000f03", "x"), CorruptArtifactError);
  CHECK_THROWS_AS(decode_hex_doubles("000000000000f0zz", "x"), CorruptArtifactError);
}

TEST_CASE("config hash") {
  const nlohmann::json a = {{"seed", 1}, {"lr", 0.001}};
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) == config_hash(nlohmann::json{{"lr", 0.001}, {"seed", 1}}));
  CHECK(config_hash(a) != config_hash(nlohmann::json{{"seed", 2}, {"lr", 0.001}}));
  // FNV-1a of the four bytes "null".
  CHECK(config_hash(nlohmann::json()) == "5b9bc4ba528108e4");
}

TEST_CASE("checkpoint round trip") {
  const Checkpoint ckpt{oracle::random_net(51, 5, 3, 0.3), Provenance{7, "abc", 12}};
  const std::string text = checkpoint_to_string(ckpt);
  const Checkpoint back = checkpoint_from_string(text);
  CHECK(back.net == ckpt.net);
  CHECK(back.provenance == ckpt.provenance);
  CHECK(checkpoint_to_string(back) == text);

  const fs::path path = scratch("ckpt.json");
  save_checkpoint(path, ckpt);
  CHECK(read_file(path) == text);
  CHECK(load_checkpoint(path).net == ckpt.net);

  SUBCASE("leaky final activation survives") {
    const Checkpoint leaky{oracle::random_net(52, 3, 2, 0.2, FinalActivation::kLeakyReLU), {}};
    CHECK(checkpoint_from_string(checkpoint_to_string(leaky)).net == leaky.net);
  }
}

TEST_CASE("corrupt checkpoints name the field") {
  const std::string text = checkpoint_to_string(Checkpoint{oracle::random_net(53, 3, 2, 0.1), {}});

  CHECK(error_of("not json").find("not a JSON object") != std::string::npos);
  CHECK(error_of(replace_once(text, "\"format_version\": 1", "\"format_version\": 9")).find("format_version 9") !=
        std::string::npos);
  CHECK(error_of(replace_once(text, "invnet-checkpoint", "something-else")).find("format") != std::string::npos);

  const nlohmann::json doc = nlohmann::json::parse(text);
  {
    nlohmann::json bad = doc;
    bad["blocks"][1]["k"] = encode_hex_doubles(std::vector<double>{1.0, 2.0, 0.0});
    // A zero diagonal is a singular weight, not a malformed file.
    try {
      checkpoint_from_string(bad.dump());
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      CHECK(e.index() == 2);
      CHECK(std::string(e.what()).find("checkpoint.blocks[1].k[2]") != std::string::npos);
    }
  }
  {
    nlohmann::json bad = doc;
    bad["blocks"][0]["u"] = encode_hex_doubles(std::vector<double>{1.0, 2.0});
    CHECK(error_of(bad.dump()).find("checkpoint.blocks[0].u: expected 3 values, got 2") != std::string::npos);
  }
  {
    nlohmann::json bad = doc;
    bad["blocks"].erase(1);
    CHECK(error_of(bad.dump()).find("checkpoint.blocks: expected 2 blocks") != std::string::npos);
  }
  {
    nlohmann::json bad = doc;
    bad["topology"].erase("dim");
    CHECK(error_of(bad.dump()).find("'dim'") != std::string::npos);
  }
  {
    nlohmann::json bad = doc;
    bad["topology"]["alpha"] = encode_hex_doubles(std::vector<double>{-0.5});
    CHECK(error_of(bad.dump()).find("checkpoint.topology.alpha") != std::string::npos);
  }
  CHECK_THROWS_AS(load_checkpoint(scratch("missing.json")), CorruptArtifactError);
}

TEST_CASE("dataset files") {
  SplitDataset data;
  Rng rng(54);
  for (int i = 0; i < 7; ++i) {
    data.train.inputs.push_back(oracle::random_vector(rng, 3, -1, 1));
    data.train.targets.push_back(oracle::random_vector(rng, 3, -1, 1));
  }
  for (int i = 0; i < 2; ++i) {
    data.eval.inputs.push_back(oracle::random_vector(rng, 3, -1, 1));
    data.eval.targets.push_back(oracle::random_vector(rng, 3, -1, 1));
  }
  const DatasetFile file{{{"task", "custom"}, {"dim", 3}}, data};
  const fs::path path = scratch("data.bin");
  save_dataset(path, file);
  const DatasetFile back = load_dataset(path);
  CHECK(back.data == data);
  CHECK(back.meta.at("task") == "custom");
  CHECK(back.meta.at("dim") == 3);
  CHECK(back.meta.at("train_count") == 7);

  std::string bytes = read_file(path);
  write_file(path, bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(load_dataset(path), CorruptArtifactError);
  write_file(path, "");
  CHECK_THROWS_AS(load_dataset(path), CorruptArtifactError);
}

TEST_CASE("vector files") {
  const std::vector<Vector> vs{Vector{1, 2}, Vector{-0.5, 1e-9}, Vector{0, -0.0}};
  const fs::path path = scratch("v.vec");
  save_vectors(path, vs);
  const auto back = load_vectors(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == vs[i]);
  CHECK(std::signbit(back[2][1]));

  CHECK_THROWS_AS(save_vectors(path, std::vector<Vector>{Vector{1, 2}, Vector{1}}), DimensionError);
  write_file(path, read_file(path) + "x");
  CHECK_THROWS_AS(load_vectors(path), CorruptArtifactError);
}

TEST_CASE("metrics records") {
  MetricsRecord r;
  r.epoch = 3;
  r.steps = 192;
  r.train_mse = 0.25;
  r.eval.eval_mse = 0.5;
  const nlohmann::json j = to_json(r);
  CHECK(j.at("schema_version") == kFormatVersion);
  CHECK(j.at("epoch") == 3);
  CHECK(j.at("eval_mse") == 0.5);
  const std::vector<MetricsRecord> rs{r, r};
  const std::string lines = metrics_jsonl(rs);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
  CHECK(nlohmann::json::parse(lines.substr(0, lines.find('\n'))) == j);
}
