#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace steerbench::model {

// On-disk model snapshot:
//   "SBCK" | u32 version | u32 header length | header JSON | u64 count | f32[count]
// All integers and floats are little-endian.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;                 // "transformer" or "ngram"
  nlohmann::ordered_json config;
  std::uint64_t vocab_hash = 0;
  std::uint64_t step = 0;
  double final_loss = 0.0;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::vector<float> parameters;

  bool operator==(const Checkpoint&) const = default;
};

// Throws IoError when the file cannot be written.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws IoError on a missing file, a bad magic/version or a truncated body.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace steerbench::model
