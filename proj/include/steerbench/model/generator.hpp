#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "steerbench/common/rng.hpp"
#include "steerbench/corpus/vocabulary.hpp"

namespace steerbench::model {

using corpus::TokenId;
using corpus::Vocabulary;

// Anything that can score the token filling a single [HOLE]. Implementations
// are deterministic functions of their parameters and the input ids.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual std::size_t sequence_length() const = 0;

  // Log-domain scores over the whole vocabulary for the token at
  // `hole_index`; -infinity marks impossible tokens.
  virtual std::vector<double> hole_logits(std::span<const TokenId> ids, std::size_t hole_index) const = 0;
};

// Index of the only [HOLE] in `ids`. Throws PreconditionError when there is
// no hole or more than one.
std::size_t find_single_hole(std::span<const TokenId> ids);

// Below this temperature sampling degenerates to argmax.
inline constexpr double kGreedyTemperature = 1e-6;

// softmax(logits / temperature) after masking the meta tokens that can never
// fill a hole ([PAD], [START], [END], [HOLE]). Greedy temperatures yield a
// one-hot vector on the argmax (lowest id on ties).
std::vector<double> hole_distribution(const Generator& gen, std::span<const TokenId> ids, double temperature);

TokenId predict_hole(const Generator& gen, std::span<const TokenId> ids, double temperature, Rng& rng);

struct InfillResult {
  std::vector<TokenId> ids;    // completed sequence, no [HOLE], re-padded
  std::size_t steps = 0;       // predictions made
  bool closed = false;         // true when [ENDHOLE] ended the loop
  std::size_t inserted = 0;    // tokens spliced in at the hole
};

// Iterative infilling: predict, splice the token before [HOLE], repeat until
// [ENDHOLE], `max_steps` predictions, or no room is left in the sequence.
// In the last two cases [HOLE] is removed.
InfillResult infill(const Generator& gen, std::span<const TokenId> ids, double temperature, Rng& rng,
                    std::size_t max_steps);

// [START] kernel void [HOLE] [END] [PAD]... at the generator's length.
std::vector<TokenId> fixed_feed(const Vocabulary& vocab, std::size_t sequence_length);

}  // namespace steerbench::model
