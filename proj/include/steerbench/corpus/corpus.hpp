#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerbench/corpus/vocabulary.hpp"
#include "steerbench/frontend/frontend.hpp"

namespace steerbench::corpus {

using frontend::SourceKernel;

struct CorpusStats {
  std::size_t total_files = 0;
  std::size_t total_kernels = 0;   // top-level kernels found, valid or not
  std::size_t valid_kernels = 0;   // kernels passing validate, before dedup
  std::size_t unique_kernels = 0;  // valid kernels after exact-text dedup
  double compilation_rate = 0.0;   // valid_kernels / total_kernels

  nlohmann::ordered_json to_json() const;
};

struct IngestResult {
  std::vector<SourceKernel> kernels;  // canonical text, first occurrence order
  CorpusStats stats;
};

// Splits raw text into top-level kernel segments (from each `kernel`
// keyword at brace depth 0 up to its matching closing brace). Text that
// does not lex is returned whole as a single segment.
std::vector<std::string> split_kernels(std::string_view file_text);

// Reads every *.kl file under `directory` (sorted by path), isolates
// kernels, keeps the valid ones in canonical form and drops duplicates.
// Throws IoError when the directory cannot be read.
IngestResult ingest_corpus(const std::filesystem::path& directory);

// Maps every distinct variable name to a distinct random lowercase letter
// and the kernel name to a random uppercase letter. Throws
// PreconditionError if the kernel does not validate or declares more than
// 26 distinct variable names.
SourceKernel rewrite_identifiers(const SourceKernel& kernel, std::uint64_t seed);

// Per-kernel seed derived from a global seed and the kernel text, so the
// mapping does not depend on enumeration order.
std::uint64_t kernel_seed(std::uint64_t global_seed, std::string_view text);

// Base tokens plus every token observed in `kernels`. Independent of the
// order of `kernels`. Throws PreconditionError on an empty list.
Vocabulary build_vocabulary(std::span<const SourceKernel> kernels);

struct EncodedKernel {
  std::vector<TokenId> ids;      // exactly sequence_length entries
  std::size_t true_length = 0;   // non-[PAD] prefix length

  bool operator==(const EncodedKernel&) const = default;
  bool truncated(const Vocabulary& vocab) const;
  nlohmann::ordered_json to_json() const;
  static EncodedKernel from_json(const nlohmann::json& doc);
};

// [START] tokens... [END] [PAD]...; kernels that do not fit are cut at the
// tail and carry no [END]. Throws PreconditionError naming the first
// token missing from the vocabulary.
EncodedKernel encode(const SourceKernel& kernel, const Vocabulary& vocab, std::size_t sequence_length);
EncodedKernel encode_text(std::string_view text, const Vocabulary& vocab, std::size_t sequence_length);

// Drops [START]/[END]/[PAD], prints [HOLE]/[ENDHOLE] verbatim, separates
// tokens with single spaces except between consecutive literal characters.
// Throws PreconditionError on an unknown id.
std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab);

// JSON-lines helpers for encoded datasets.
void write_encoded_jsonl(const std::filesystem::path& path, std::span<const EncodedKernel> data);
std::vector<EncodedKernel> read_encoded_jsonl(const std::filesystem::path& path);

}  // namespace steerbench::corpus
