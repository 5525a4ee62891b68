#include "steerbench/model/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"

namespace steerbench::model {
namespace {

constexpr std::uint64_t kLeftSeed = 0x6c656674ULL;
constexpr std::uint64_t kRightSeed = 0x72696768ULL;
constexpr double kMinClosure = 1e-9;

// Hashes of the k tokens immediately left of `pos`, for k = 0..max_k.
std::vector<std::uint64_t> left_hashes(std::span<const TokenId> seq, std::size_t pos, std::size_t max_k) {
  std::vector<std::uint64_t> h(1, kLeftSeed);
  for (std::size_t k = 1; k <= max_k && k <= pos; ++k) {
    h.push_back(mix_seed(h.back() ^ static_cast<std::uint64_t>(seq[pos - k]), k));
  }
  return h;
}

// Hashes of the first r tokens of `right`, for r = 0..right.size().
std::vector<std::uint64_t> right_hashes(std::span<const TokenId> right) {
  std::vector<std::uint64_t> h(1, kRightSeed);
  for (std::size_t r = 0; r < right.size(); ++r) {
    h.push_back(mix_seed(h.back() ^ static_cast<std::uint64_t>(right[r]), r + 0x100));
  }
  return h;
}

std::uint64_t token_key(std::uint64_t left_hash, std::size_t k) { return mix_seed(left_hash, 0x746f6b00ULL + k); }

std::uint64_t closure_key(std::uint64_t left_hash, std::uint64_t right_hash, std::size_t k) {
  return mix_seed(left_hash ^ (right_hash * 0x9e3779b97f4a7c15ULL), 0x636c6f00ULL + k);
}

// Visible right context of a hole: tokens up to and including [END],
// stopping before the first [PAD].
std::span<const TokenId> right_context(std::span<const TokenId> tail) {
  std::size_t n = 0;
  while (n < tail.size() && tail[n] != Vocabulary::pad) {
    ++n;
    if (tail[n - 1] == Vocabulary::end) break;
  }
  return tail.first(n);
}

}  // namespace

void NgramConfig::check() const {
  if (order < 2) throw PreconditionError("n-gram order must be at least 2");
  if (closure_order < 1) throw PreconditionError("closure_order must be at least 1");
  if (sequence_length < 5) throw PreconditionError("sequence_length must be at least 5");
  if (!(token_backoff > 0.0) || !(closure_backoff > 0.0)) throw PreconditionError("backoff weights must be positive");
  if (!(max_hole_ratio > 0.0 && max_hole_ratio <= 1.0)) throw PreconditionError("max_hole_ratio must be in (0, 1]");
}

nlohmann::ordered_json NgramConfig::to_json() const {
  return {{"order", order},
          {"closure_order", closure_order},
          {"sequence_length", sequence_length},
          {"token_backoff", token_backoff},
          {"closure_backoff", closure_backoff},
          {"max_hole_ratio", max_hole_ratio}};
}

NgramConfig NgramConfig::from_json(const nlohmann::json& doc) {
  NgramConfig cfg;
  cfg.order = doc.at("order").get<std::size_t>();
  cfg.closure_order = doc.at("closure_order").get<std::size_t>();
  cfg.sequence_length = doc.at("sequence_length").get<std::size_t>();
  cfg.token_backoff = doc.at("token_backoff").get<double>();
  cfg.closure_backoff = doc.at("closure_backoff").get<double>();
  cfg.max_hole_ratio = doc.at("max_hole_ratio").get<double>();
  cfg.check();
  return cfg;
}

NgramModel::NgramModel(Vocabulary vocab, NgramConfig cfg, std::vector<std::vector<TokenId>> sequences)
    : vocab_(std::move(vocab)), cfg_(cfg), sequences_(std::move(sequences)) {
  cfg_.check();
  if (sequences_.empty()) throw PreconditionError("cannot train an n-gram model on an empty corpus");
  for (const auto& seq : sequences_) {
    for (TokenId id : seq) {
      if (!vocab_.contains(id)) throw PreconditionError("training sequence contains an id outside the vocabulary");
    }
  }
  build();
}

void NgramModel::build() {
  const std::size_t v = vocab_.size();
  const std::size_t max_k = cfg_.order - 1;

  std::vector<double> unigram_counts(v, 0.0);
  double unigram_total = 0.0;
  for (const auto& seq : sequences_) {
    for (std::size_t j = 1; j < seq.size(); ++j) {
      const TokenId t = seq[j];
      if (Vocabulary::is_meta(t)) continue;
      unigram_counts[static_cast<std::size_t>(t)] += 1.0;
      unigram_total += 1.0;
      const auto lh = left_hashes(seq, j, max_k);
      for (std::size_t k = 1; k < lh.size(); ++k) {
        Counts& c = contexts_[token_key(lh[k], k)];
        c.total += 1.0;
        auto it = std::lower_bound(c.next.begin(), c.next.end(), t,
                                   [](const auto& entry, TokenId id) { return entry.first < id; });
        if (it != c.next.end() && it->first == t) {
          it->second += 1.0;
        } else {
          c.next.insert(it, {t, 1.0});
        }
      }
    }
  }
  const double open_tokens = static_cast<double>(v - static_cast<std::size_t>(Vocabulary::meta_count));
  unigram_.assign(v, 0.0);
  for (std::size_t t = Vocabulary::meta_count; t < v; ++t) {
    unigram_[t] = (unigram_counts[t] + 1.0) / (unigram_total + open_tokens);
  }

  // Every (start, raw length) draw of the datagen sampler counts once; a raw
  // length beyond the end of the body clips to the remaining span. Each
  // level is gathered as a flat list, sorted and merged.
  struct Entry {
    std::uint64_t key;
    float closed;
    float weight;
  };
  double closed_sum = 0.0;
  double total_sum = 0.0;
  closures_.assign(cfg_.closure_order, {});
  std::vector<Entry> entries;
  for (std::size_t k = 0; k < cfg_.closure_order; ++k) {
    entries.clear();
    for (const auto& seq : sequences_) {
      const std::size_t t = seq.size();
      if (t < 3) continue;
      const auto end_it = std::find(seq.begin(), seq.end(), Vocabulary::end);
      const std::size_t body_end = end_it == seq.end() ? t : static_cast<std::size_t>(end_it - seq.begin());
      const auto max_len = static_cast<std::size_t>(std::floor(cfg_.max_hole_ratio * static_cast<double>(t)));
      const std::span<const TokenId> whole(seq);
      std::vector<std::uint64_t> rights(t + 1);
      for (std::size_t p = 1; p <= t; ++p) {
        const auto right = right_context(whole.subspan(p));
        const auto rh = right_hashes(right.first(std::min(right.size(), k + 1)));
        rights[p] = rh.back();
      }
      for (std::size_t i = std::max<std::size_t>(1, k); i <= body_end; ++i) {
        const std::uint64_t lh = left_hashes(seq, i, k).back();
        const std::size_t remaining = body_end - i;
        for (std::size_t len = 0; len <= std::min(max_len, remaining); ++len) {
          const double weight = len == remaining ? static_cast<double>(max_len + 1 - len) : 1.0;
          const double closed = len == 0 ? weight : 0.0;
          if (k == 0) {
            closed_sum += closed;
            total_sum += weight;
          }
          entries.push_back({closure_key(lh, rights[i + len], k), static_cast<float>(closed),
                             static_cast<float>(weight)});
        }
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
    ClosureLevel& level = closures_[k];
    for (const Entry& e : entries) {
      if (level.keys.empty() || level.keys.back() != e.key) {
        level.keys.push_back(e.key);
        level.counts.push_back({});
      }
      level.counts.back().closed += e.closed;
      level.counts.back().total += e.weight;
    }
  }
  closure_prior_ = total_sum > 0.0 ? closed_sum / total_sum : 0.5;
}

std::vector<double> NgramModel::token_distribution(std::span<const TokenId> left) const {
  std::vector<double> p = unigram_;
  const auto lh = left_hashes(left, left.size(), cfg_.order - 1);
  const double beta = cfg_.token_backoff;
  for (std::size_t k = 1; k < lh.size(); ++k) {
    const auto it = contexts_.find(token_key(lh[k], k));
    if (it == contexts_.end()) break;
    const double denom = it->second.total + beta;
    for (double& x : p) x *= beta / denom;
    for (const auto& [token, count] : it->second.next) p[static_cast<std::size_t>(token)] += count / denom;
  }
  return p;
}

double NgramModel::closure_probability(std::span<const TokenId> left, std::span<const TokenId> right) const {
  const auto lh = left_hashes(left, left.size(), cfg_.closure_order - 1);
  const auto rh = right_hashes(right.first(std::min(right.size(), cfg_.closure_order)));
  const double gamma = cfg_.closure_backoff;
  double lambda = closure_prior_;
  for (std::size_t k = 0; k < lh.size() && k < closures_.size(); ++k) {
    const std::size_t r = std::min(k + 1, rh.size() - 1);
    const ClosureLevel& level = closures_[k];
    const std::uint64_t key = closure_key(lh[k], rh[r], k);
    const auto it = std::lower_bound(level.keys.begin(), level.keys.end(), key);
    if (it == level.keys.end() || *it != key) break;
    const Closure& c = level.counts[static_cast<std::size_t>(it - level.keys.begin())];
    lambda = (c.closed + gamma * lambda) / (c.total + gamma);
  }
  return std::clamp(lambda, kMinClosure, 1.0 - kMinClosure);
}

std::vector<double> NgramModel::hole_logits(std::span<const TokenId> ids, std::size_t hole_index) const {
  if (ids.size() != cfg_.sequence_length) throw PreconditionError("input length does not match the model");
  if (hole_index >= ids.size() || ids[hole_index] != Vocabulary::hole) {
    throw PreconditionError("hole_index does not point at [HOLE]");
  }
  const auto left = ids.first(hole_index);
  const auto right = right_context(ids.subspan(hole_index + 1));
  const double lambda = closure_probability(left, right);
  const auto p = token_distribution(left);
  std::vector<double> logits(vocab_.size(), -std::numeric_limits<double>::infinity());
  logits[static_cast<std::size_t>(Vocabulary::endhole)] = std::log(lambda);
  const double open = std::log1p(-lambda);
  for (std::size_t t = Vocabulary::meta_count; t < logits.size(); ++t) logits[t] = open + std::log(p[t]);
  return logits;
}

Checkpoint NgramModel::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = "ngram";
  ckpt.config = cfg_.to_json();
  ckpt.vocab_hash = vocab_.hash();
  ckpt.extra = {{"sequences", sequences_}};
  return ckpt;
}

NgramModel NgramModel::from_checkpoint(const Checkpoint& ckpt, const Vocabulary& vocab) {
  if (ckpt.kind != "ngram") throw PreconditionError("checkpoint holds a '" + ckpt.kind + "' model, not an n-gram");
  if (ckpt.vocab_hash != vocab.hash()) throw PreconditionError("checkpoint was built for a different vocabulary");
  return NgramModel(vocab, NgramConfig::from_json(ckpt.config),
                    ckpt.extra.at("sequences").get<std::vector<std::vector<TokenId>>>());
}

NgramModel train_ngram(std::size_t order, std::span<const corpus::EncodedKernel> kernels, const Vocabulary& vocab,
                       NgramConfig cfg) {
  if (kernels.empty()) throw PreconditionError("cannot train an n-gram model on an empty corpus");
  cfg.order = order;
  cfg.sequence_length = kernels.front().ids.size();
  std::vector<std::vector<TokenId>> sequences;
  sequences.reserve(kernels.size());
  for (const auto& k : kernels) {
    if (k.ids.size() != cfg.sequence_length) throw PreconditionError("encoded kernels differ in sequence length");
    sequences.emplace_back(k.ids.begin(), k.ids.begin() + static_cast<std::ptrdiff_t>(k.true_length));
  }
  return NgramModel(vocab, cfg, std::move(sequences));
}

}  // namespace steerbench::model
