#include "steerbench/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "steerbench/common/error.hpp"

namespace steerbench::model {
namespace {

constexpr char kMagic[4] = {'S', 'B', 'C', 'K'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(const std::string& in, std::size_t& pos, const std::filesystem::path& path) {
  if (pos + sizeof(U) > in.size()) throw IoError("truncated checkpoint: " + path.string());
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += sizeof(U);
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::ordered_json header;
  header["kind"] = ckpt.kind;
  header["config"] = ckpt.config;
  header["vocab_hash"] = ckpt.vocab_hash;
  header["step"] = ckpt.step;
  header["final_loss"] = ckpt.final_loss;
  header["extra"] = ckpt.extra;
  const std::string text = header.dump();

  std::string blob(kMagic, 4);
  put_le<std::uint32_t>(blob, Checkpoint::kVersion);
  put_le<std::uint32_t>(blob, static_cast<std::uint32_t>(text.size()));
  blob += text;
  put_le<std::uint64_t>(blob, ckpt.parameters.size());
  blob.reserve(blob.size() + 4 * ckpt.parameters.size());
  for (float p : ckpt.parameters) put_le<std::uint32_t>(blob, std::bit_cast<std::uint32_t>(p));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob.size() < 4 || std::memcmp(blob.data(), kMagic, 4) != 0) {
    throw IoError("not a checkpoint file: " + path.string());
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(blob, pos, path);
  if (version != Checkpoint::kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " + path.string());
  }
  const auto header_len = get_le<std::uint32_t>(blob, pos, path);
  if (pos + header_len > blob.size()) throw IoError("truncated checkpoint: " + path.string());
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(blob.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  pos += header_len;
  Checkpoint ckpt;
  try {
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.config = header.at("config");
    ckpt.vocab_hash = header.at("vocab_hash").get<std::uint64_t>();
    ckpt.step = header.at("step").get<std::uint64_t>();
    ckpt.final_loss = header.at("final_loss").get<double>();
    ckpt.extra = header.at("extra");
  } catch (const nlohmann::json::exception& e) {
    throw IoError("incomplete checkpoint header in " + path.string() + ": " + e.what());
  }
  const auto count = get_le<std::uint64_t>(blob, pos, path);
  if (count > (blob.size() - pos) / 4 || pos + 4 * count != blob.size()) {
    throw IoError("checkpoint parameter block has the wrong size: " + path.string());
  }
  ckpt.parameters.resize(count);
  for (auto& p : ckpt.parameters) p = std::bit_cast<float>(get_le<std::uint32_t>(blob, pos, path));
  return ckpt;
}

}  // namespace steerbench::model
