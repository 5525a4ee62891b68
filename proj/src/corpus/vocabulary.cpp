#include "steerbench/corpus/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"
#include "steerbench/frontend/lexer.hpp"

namespace steerbench::corpus {

namespace {

const std::vector<std::string>& meta_tokens() {
  static const std::vector<std::string> meta = {
      std::string(kPad), std::string(kStart), std::string(kEnd), std::string(kHole), std::string(kEndHole),
  };
  return meta;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  std::set<std::string> sorted(tokens.begin(), tokens.end());
  for (const auto& m : meta_tokens()) {
    if (sorted.count(m) != 0) throw PreconditionError("meta token " + m + " passed as a regular token");
  }
  id_to_token_ = meta_tokens();
  id_to_token_.insert(id_to_token_.end(), sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (!contains(id)) throw PreconditionError("token id " + std::to_string(id) + " is not in the vocabulary");
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = fnv1a("steerbench-vocab");
  for (const auto& t : id_to_token_) {
    h = fnv1a(t, h);
    h = fnv1a(std::string_view("\x1f", 1), h);
  }
  return h;
}

nlohmann::ordered_json Vocabulary::to_json() const {
  nlohmann::ordered_json doc;
  doc["tokens"] = std::vector<std::string>(id_to_token_.begin() + meta_count, id_to_token_.end());
  doc["meta"] = {{"[PAD]", pad}, {"[START]", start}, {"[END]", end}, {"[HOLE]", hole}, {"[ENDHOLE]", endhole}};
  return doc;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& doc) {
  try {
    Vocabulary vocab(doc.at("tokens").get<std::vector<std::string>>());
    const auto& meta = doc.at("meta");
    for (std::size_t i = 0; i < meta_tokens().size(); ++i) {
      if (meta.at(meta_tokens()[i]).get<TokenId>() != static_cast<TokenId>(i)) {
        throw PreconditionError("vocabulary meta ids do not match the fixed layout");
      }
    }
    return vocab;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed vocabulary: ") + e.what());
  }
}

std::vector<std::string> tokenize(std::string_view canonical_text) {
  auto lexed = frontend::lex(canonical_text);
  if (!lexed) throw PreconditionError("cannot tokenize: " + lexed.diagnostic().format());
  std::vector<std::string> tokens;
  for (const auto& lexeme : lexed.value()) {
    if (lexeme.kind == frontend::LexemeKind::int_literal || lexeme.kind == frontend::LexemeKind::float_literal) {
      for (char c : lexeme.text) tokens.emplace_back(1, c);
    } else {
      tokens.push_back(lexeme.text);
    }
  }
  return tokens;
}

std::vector<std::string> base_tokens() {
  std::vector<std::string> tokens;
  const auto append = [&](const std::vector<std::string>& v) { tokens.insert(tokens.end(), v.begin(), v.end()); };
  append(frontend::keywords());
  append(frontend::builtins());
  append(frontend::punctuators());
  for (char c = 'a'; c <= 'z'; ++c) tokens.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z'; ++c) tokens.emplace_back(1, c);
  for (char c = '0'; c <= '9'; ++c) tokens.emplace_back(1, c);
  tokens.emplace_back(".");
  return tokens;
}

}  // namespace steerbench::corpus
