#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "steerbench/common/rng.hpp"
#include "steerbench/corpus/corpus.hpp"

namespace steerbench::datagen {

using corpus::EncodedKernel;
using corpus::TokenId;
using corpus::Vocabulary;

struct DatagenConfig {
  double max_hole_ratio = 0.9;       // max hidden span as a fraction of true_length
  std::size_t holes_per_instance = 1;
  std::uint64_t seed = 0;

  void check() const;
};

// One training example: a single [HOLE] replaces a hidden span.
struct TrainingInstance {
  std::vector<TokenId> input_ids;     // same length as the source encoding
  std::size_t hole_index = 0;
  TokenId target = Vocabulary::endhole;  // first hidden token or [ENDHOLE]
  std::size_t hidden_length = 0;
  std::vector<TokenId> hidden;        // the removed span, kept for inspection
  std::size_t source_index = 0;       // kernel index within the dataset

  nlohmann::ordered_json to_json() const;
};

// Legal placement of a hole in an encoding: starts in [1, body_end] where
// body_end is the index of [END] (or true_length when truncated); hidden
// length in [0, body_end - start].
struct HolePlacement {
  std::size_t start = 0;
  std::size_t length = 0;
};

// Draws a placement: start uniform over the legal starts, length uniform
// over [0, floor(max_hole_ratio * true_length)] then clipped to the
// remaining span. When the encoding fills the whole sequence the length
// is raised to 1 so the [HOLE] fits. Throws PreconditionError when
// true_length < 3.
HolePlacement sample_placement(const EncodedKernel& encoded, double max_hole_ratio, Rng& rng);

// Applies a placement.
TrainingInstance apply_hole(const EncodedKernel& encoded, HolePlacement placement);

TrainingInstance insert_hole(const EncodedKernel& encoded, const DatagenConfig& cfg, Rng& rng);

// Re-inserts the hidden span in place of [HOLE]; the inverse of apply_hole.
std::vector<TokenId> restore(const TrainingInstance& instance);

// Unbounded, reproducible stream of hole instances over a fixed dataset.
// Each draw picks a kernel uniformly then calls insert_hole; kernels that
// are too short are skipped.
class InfillStream {
 public:
  InfillStream(std::vector<EncodedKernel> kernels, DatagenConfig cfg);

  TrainingInstance next();
  std::vector<TrainingInstance> take(std::size_t n);
  std::size_t skipped() const { return skipped_; }
  const std::vector<EncodedKernel>& kernels() const { return kernels_; }

 private:
  std::vector<EncodedKernel> kernels_;
  DatagenConfig cfg_;
  Rng rng_;
  std::size_t skipped_ = 0;
};

// Ablation stream: a single hidden non-meta token replaced by a mask id.
// The mask id is vocab.size(), one past the vocabulary.
struct MaskedInstance {
  std::vector<TokenId> input_ids;
  std::size_t mask_index = 0;
  TokenId target = 0;
};

class MaskedStream {
 public:
  MaskedStream(std::vector<EncodedKernel> kernels, TokenId mask_id, std::uint64_t seed);
  MaskedInstance next();

 private:
  std::vector<EncodedKernel> kernels_;
  TokenId mask_id_;
  Rng rng_;
};

InfillStream make_dataset(std::span<const corpus::SourceKernel> kernels, const Vocabulary& vocab,
                          std::size_t sequence_length, const DatagenConfig& cfg);
MaskedStream make_masked_dataset(std::span<const corpus::SourceKernel> kernels, const Vocabulary& vocab,
                                 std::size_t sequence_length, std::uint64_t seed);

}  // namespace steerbench::datagen
