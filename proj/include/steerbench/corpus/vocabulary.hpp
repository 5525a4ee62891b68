#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace steerbench::corpus {

using TokenId = std::int32_t;

inline constexpr std::string_view kPad = "[PAD]";
inline constexpr std::string_view kStart = "[START]";
inline constexpr std::string_view kEnd = "[END]";
inline constexpr std::string_view kHole = "[HOLE]";
inline constexpr std::string_view kEndHole = "[ENDHOLE]";

// Bijective token <-> id map. The five meta tokens take ids 0..4
// ([PAD], [START], [END], [HOLE], [ENDHOLE]); every other token follows in
// byte-wise sorted order. Immutable once built.
class Vocabulary {
 public:
  static constexpr TokenId pad = 0;
  static constexpr TokenId start = 1;
  static constexpr TokenId end = 2;
  static constexpr TokenId hole = 3;
  static constexpr TokenId endhole = 4;
  static constexpr TokenId meta_count = 5;

  // `tokens` must not contain meta tokens; duplicates are collapsed.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return id_to_token_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < size(); }
  static bool is_meta(TokenId id) { return id >= 0 && id < meta_count; }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // Stable 64-bit fingerprint of the id assignment.
  std::uint64_t hash() const;

  nlohmann::ordered_json to_json() const;
  static Vocabulary from_json(const nlohmann::json& doc);

  bool operator==(const Vocabulary& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Token spelling of one lexeme sequence: literals are split into one token
// per character, everything else is one token per lexeme.
std::vector<std::string> tokenize(std::string_view canonical_text);

// Tokens every vocabulary carries regardless of the corpus: keywords,
// builtins, punctuators, single-letter identifiers, digits and '.'.
std::vector<std::string> base_tokens();

}  // namespace steerbench::corpus
