#include "steerbench/model/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerbench/common/error.hpp"

namespace steerbench::model {

std::size_t find_single_hole(std::span<const TokenId> ids) {
  std::size_t found = ids.size();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != Vocabulary::hole) continue;
    if (found != ids.size()) throw PreconditionError("input contains more than one [HOLE]");
    found = i;
  }
  if (found == ids.size()) throw PreconditionError("input contains no [HOLE]");
  return found;
}

std::vector<double> hole_distribution(const Generator& gen, std::span<const TokenId> ids, double temperature) {
  const std::size_t hole = find_single_hole(ids);
  std::vector<double> logits = gen.hole_logits(ids, hole);
  if (logits.size() != gen.vocabulary().size()) throw Error("generator returned logits of the wrong size");
  constexpr double kMasked = -std::numeric_limits<double>::infinity();
  for (TokenId banned : {Vocabulary::pad, Vocabulary::start, Vocabulary::end, Vocabulary::hole}) {
    logits[static_cast<std::size_t>(banned)] = kMasked;
  }
  const auto best = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  std::vector<double> probs(logits.size(), 0.0);
  if (!std::isfinite(logits[best])) throw Error("generator assigned zero probability to every token");
  if (temperature < kGreedyTemperature) {
    probs[best] = 1.0;
    return probs;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) continue;
    probs[i] = std::exp((logits[i] - logits[best]) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

TokenId predict_hole(const Generator& gen, std::span<const TokenId> ids, double temperature, Rng& rng) {
  const auto probs = hole_distribution(gen, ids, temperature);
  if (temperature < kGreedyTemperature) {
    return static_cast<TokenId>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  }
  return static_cast<TokenId>(rng.categorical(probs));
}

InfillResult infill(const Generator& gen, std::span<const TokenId> ids, double temperature, Rng& rng,
                    std::size_t max_steps) {
  if (max_steps < 1) throw PreconditionError("max_steps must be at least 1");
  std::size_t hole = find_single_hole(ids);
  InfillResult out;
  // Work on the unpadded content; re-pad at the end.
  std::vector<TokenId> seq(ids.begin(), ids.end());
  while (!seq.empty() && seq.back() == Vocabulary::pad) seq.pop_back();
  const std::size_t capacity = ids.size();
  std::vector<TokenId> padded;
  auto pad_to_capacity = [&] {
    padded = seq;
    padded.resize(capacity, Vocabulary::pad);
  };
  while (out.steps < max_steps && seq.size() < capacity) {
    pad_to_capacity();
    const TokenId token = predict_hole(gen, padded, temperature, rng);
    ++out.steps;
    if (token == Vocabulary::endhole) {
      out.closed = true;
      break;
    }
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(hole), token);
    ++hole;
    ++out.inserted;
  }
  seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(hole));
  seq.resize(capacity, Vocabulary::pad);
  out.ids = std::move(seq);
  return out;
}

std::vector<TokenId> fixed_feed(const Vocabulary& vocab, std::size_t sequence_length) {
  const auto kernel = vocab.find("kernel");
  const auto void_ = vocab.find("void");
  if (!kernel || !void_) throw PreconditionError("vocabulary lacks the 'kernel'/'void' tokens");
  if (sequence_length < 5) throw PreconditionError("sequence length too short for the fixed feed");
  std::vector<TokenId> ids = {Vocabulary::start, *kernel, *void_, Vocabulary::hole, Vocabulary::end};
  ids.resize(sequence_length, Vocabulary::pad);
  return ids;
}

}  // namespace steerbench::model
