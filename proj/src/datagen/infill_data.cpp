#include "steerbench/datagen/infill_data.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "steerbench/common/error.hpp"

namespace steerbench::datagen {

void DatagenConfig::check() const {
  if (!(max_hole_ratio > 0.0 && max_hole_ratio <= 1.0)) {
    throw PreconditionError("max_hole_ratio must lie in (0, 1]");
  }
  if (holes_per_instance != 1) throw PreconditionError("exactly one hole per instance is supported");
}

nlohmann::ordered_json TrainingInstance::to_json() const {
  nlohmann::ordered_json doc;
  doc["input_ids"] = input_ids;
  doc["hole_index"] = hole_index;
  doc["target"] = target;
  doc["hidden_length"] = hidden_length;
  doc["source_index"] = source_index;
  return doc;
}

namespace {

std::size_t body_end(const EncodedKernel& e) {
  const auto limit = e.ids.begin() + static_cast<std::ptrdiff_t>(e.true_length);
  const auto it = std::find(e.ids.begin(), limit, Vocabulary::end);
  return static_cast<std::size_t>(it - e.ids.begin());
}

}  // namespace

HolePlacement sample_placement(const EncodedKernel& encoded, double max_hole_ratio, Rng& rng) {
  if (encoded.true_length < 3) {
    throw PreconditionError("kernel too short for a hole (true_length " + std::to_string(encoded.true_length) + ")");
  }
  const std::size_t end = body_end(encoded);
  // A full sequence has no spare slot, so the hole must hide at least one
  // token and cannot start at body_end.
  const bool full = encoded.true_length == encoded.ids.size();
  HolePlacement p;
  p.start = 1 + rng.uniform_index(full ? end - 1 : end);
  const auto max_len = static_cast<std::size_t>(std::floor(max_hole_ratio * static_cast<double>(encoded.true_length)));
  p.length = std::min(rng.uniform_index(max_len + 1), end - p.start);
  if (full) p.length = std::max<std::size_t>(p.length, 1);
  return p;
}

TrainingInstance apply_hole(const EncodedKernel& encoded, HolePlacement placement) {
  const std::size_t end = body_end(encoded);
  if (placement.start < 1 || placement.start > end || placement.start + placement.length > end) {
    throw PreconditionError("illegal hole placement");
  }
  if (placement.length == 0 && encoded.true_length == encoded.ids.size()) {
    throw PreconditionError("no room for an empty hole in a full sequence");
  }
  TrainingInstance out;
  out.hole_index = placement.start;
  out.hidden_length = placement.length;
  const auto first = encoded.ids.begin() + static_cast<std::ptrdiff_t>(placement.start);
  const auto last = first + static_cast<std::ptrdiff_t>(placement.length);
  out.hidden.assign(first, last);
  out.target = placement.length == 0 ? Vocabulary::endhole : *first;
  out.input_ids.assign(encoded.ids.begin(), first);
  out.input_ids.push_back(Vocabulary::hole);
  out.input_ids.insert(out.input_ids.end(), last,
                       encoded.ids.begin() + static_cast<std::ptrdiff_t>(encoded.true_length));
  out.input_ids.resize(encoded.ids.size(), Vocabulary::pad);
  return out;
}

TrainingInstance insert_hole(const EncodedKernel& encoded, const DatagenConfig& cfg, Rng& rng) {
  cfg.check();
  return apply_hole(encoded, sample_placement(encoded, cfg.max_hole_ratio, rng));
}

std::vector<TokenId> restore(const TrainingInstance& instance) {
  std::vector<TokenId> out(instance.input_ids.begin(),
                           instance.input_ids.begin() + static_cast<std::ptrdiff_t>(instance.hole_index));
  out.insert(out.end(), instance.hidden.begin(), instance.hidden.end());
  out.insert(out.end(), instance.input_ids.begin() + static_cast<std::ptrdiff_t>(instance.hole_index) + 1,
             instance.input_ids.end());
  // Drop the [PAD]s that apply_hole appended to keep the length fixed.
  out.resize(instance.input_ids.size(), Vocabulary::pad);
  return out;
}

InfillStream::InfillStream(std::vector<EncodedKernel> kernels, DatagenConfig cfg)
    : kernels_(std::move(kernels)), cfg_(cfg), rng_(cfg.seed) {
  cfg_.check();
  if (kernels_.empty()) throw PreconditionError("infill dataset needs at least one kernel");
  const bool any_usable = std::any_of(kernels_.begin(), kernels_.end(),
                                      [](const EncodedKernel& k) { return k.true_length >= 3; });
  if (!any_usable) throw PreconditionError("no kernel in the dataset is long enough for a hole");
}

TrainingInstance InfillStream::next() {
  for (;;) {
    const std::size_t index = rng_.uniform_index(kernels_.size());
    const EncodedKernel& k = kernels_[index];
    if (k.true_length < 3) {
      if (skipped_++ == 0) std::clog << "warning: skipping kernel " << index << " (too short for a hole)\n";
      continue;
    }
    TrainingInstance inst = insert_hole(k, cfg_, rng_);
    inst.source_index = index;
    return inst;
  }
}

std::vector<TrainingInstance> InfillStream::take(std::size_t n) {
  std::vector<TrainingInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(next());
  return out;
}

MaskedStream::MaskedStream(std::vector<EncodedKernel> kernels, TokenId mask_id, std::uint64_t seed)
    : kernels_(std::move(kernels)), mask_id_(mask_id), rng_(seed) {
  if (kernels_.empty()) throw PreconditionError("masked dataset needs at least one kernel");
}

MaskedInstance MaskedStream::next() {
  for (;;) {
    const EncodedKernel& k = kernels_[rng_.uniform_index(kernels_.size())];
    const std::size_t end = body_end(k);
    if (end < 2) continue;
    MaskedInstance m;
    m.mask_index = 1 + rng_.uniform_index(end - 1);  // [1, end-1], never a meta token
    m.input_ids = k.ids;
    m.target = k.ids[m.mask_index];
    m.input_ids[m.mask_index] = mask_id_;
    return m;
  }
}

namespace {

std::vector<EncodedKernel> encode_all(std::span<const corpus::SourceKernel> kernels, const Vocabulary& vocab,
                                      std::size_t sequence_length) {
  std::vector<EncodedKernel> out;
  out.reserve(kernels.size());
  for (const auto& k : kernels) out.push_back(corpus::encode(k, vocab, sequence_length));
  return out;
}

}  // namespace

InfillStream make_dataset(std::span<const corpus::SourceKernel> kernels, const Vocabulary& vocab,
                          std::size_t sequence_length, const DatagenConfig& cfg) {
  return InfillStream(encode_all(kernels, vocab, sequence_length), cfg);
}

MaskedStream make_masked_dataset(std::span<const corpus::SourceKernel> kernels, const Vocabulary& vocab,
                                 std::size_t sequence_length, std::uint64_t seed) {
  return MaskedStream(encode_all(kernels, vocab, sequence_length), static_cast<TokenId>(vocab.size()), seed);
}

}  // namespace steerbench::datagen
