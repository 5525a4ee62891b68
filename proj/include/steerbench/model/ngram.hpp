#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "steerbench/corpus/corpus.hpp"
#include "steerbench/model/checkpoint.hpp"
#include "steerbench/model/generator.hpp"

namespace steerbench::model {

struct NgramConfig {
  std::size_t order = 16;             // tokens of left context + 1
  std::size_t closure_order = 8;      // left-context levels of the closure table
  std::size_t sequence_length = 128;
  double token_backoff = 0.05;        // weight of the lower order in the token model
  double closure_backoff = 0.05;      // same for the closure model
  double max_hole_ratio = 0.9;        // must match the datagen setting
  void check() const;
  nlohmann::ordered_json to_json() const;
  static NgramConfig from_json(const nlohmann::json& doc);
};

// Interpolated backoff n-gram over the token sequences of a corpus.
//
// The token model predicts the next token from up to order-1 tokens to
// the left of the hole, backing off to a Laplace-smoothed unigram over the
// non-meta tokens. The probability of [ENDHOLE] comes from a separate table
// of closure frequencies: every legal (start, length) placement of every
// training kernel is enumerated, and for each visible context (k tokens
// left of the hole, k+1 tokens right of it, k < closure_order) we count how
// often the hidden span was empty. Final distribution: P([ENDHOLE]) = c, P(t) = (1-c) P_tok(t).
class NgramModel final : public Generator {
 public:
  NgramModel(Vocabulary vocab, NgramConfig cfg, std::vector<std::vector<TokenId>> sequences);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t sequence_length() const override { return cfg_.sequence_length; }
  std::vector<double> hole_logits(std::span<const TokenId> ids, std::size_t hole_index) const override;

  const NgramConfig& config() const { return cfg_; }
  // Smoothed next-token distribution (zero on meta ids, sums to 1).
  std::vector<double> token_distribution(std::span<const TokenId> left) const;
  // Probability that a hole between `left` and `right` is already complete.
  double closure_probability(std::span<const TokenId> left, std::span<const TokenId> right) const;

  Checkpoint to_checkpoint() const;
  // Throws PreconditionError when the checkpoint is not an n-gram model or
  // was built for a different vocabulary.
  static NgramModel from_checkpoint(const Checkpoint& ckpt, const Vocabulary& vocab);

 private:
  struct Counts {
    double total = 0.0;
    std::vector<std::pair<TokenId, double>> next;  // sorted by token id
  };
  struct Closure {
    double closed = 0.0;
    double total = 0.0;
  };
  struct ClosureLevel {
    std::vector<std::uint64_t> keys;  // sorted
    std::vector<Closure> counts;
  };

  void build();

  Vocabulary vocab_;
  NgramConfig cfg_;
  std::vector<std::vector<TokenId>> sequences_;
  std::vector<double> unigram_;
  std::unordered_map<std::uint64_t, Counts> contexts_;
  std::vector<ClosureLevel> closures_;
  double closure_prior_ = 0.0;
};

// Builds an n-gram model from encoded kernels. Throws PreconditionError on
// an empty corpus or order < 2.
NgramModel train_ngram(std::size_t order, std::span<const corpus::EncodedKernel> kernels, const Vocabulary& vocab,
                       NgramConfig cfg = {});

}  // namespace steerbench::model
