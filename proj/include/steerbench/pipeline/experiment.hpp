#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "steerbench/active/acquisition.hpp"
#include "steerbench/active/committee.hpp"
#include "steerbench/corpus/corpus.hpp"
#include "steerbench/downstream/device_model.hpp"
#include "steerbench/downstream/heuristic.hpp"
#include "steerbench/model/generator.hpp"
#include "steerbench/steering/beam.hpp"

namespace steerbench::pipeline {

using corpus::SourceKernel;
using downstream::LabeledPoint;

struct PreparedCorpus {
  std::vector<SourceKernel> kernels;  // renamed, unique, ingest order
  corpus::CorpusStats stats;
  std::size_t rename_dropped = 0;     // kernels with too many variables to rename
  corpus::Vocabulary vocab;
  std::vector<corpus::EncodedKernel> encoded;
};

// Renames identifiers with per-kernel seeds, drops duplicates created by
// renaming, builds the vocabulary and encodes every kernel.
PreparedCorpus prepare_corpus(const corpus::IngestResult& ingested, std::uint64_t seed, std::size_t sequence_length);

// Grewe features of a kernel that validates.
features::FeatureVector grewe_features(std::string_view text);

// Labels one generated kernel across the grid; empty for kernels doing no
// arithmetic or memory work.
std::vector<LabeledPoint> label_kernel(std::string_view text, std::span<const downstream::Workload> grid,
                                       const downstream::DeviceModel& model);

struct ReferenceConfig {
  std::size_t train_kernels = 12;  // labeled seed set; the rest become the test suite
  std::size_t gpu_parts = 71;      // GPU:CPU ratio of the test points
  std::size_t cpu_parts = 29;
  downstream::DeviceModel model;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

struct ReferenceSuite {
  std::vector<SourceKernel> train_kernels, test_kernels;
  std::vector<LabeledPoint> train, test;
  std::vector<downstream::Workload> grid;
};

// Shuffles the kernels, labels the first train_kernels on the default grid
// as the training set and subsamples the remaining kernels' points to the
// exact gpu_parts:cpu_parts ratio, keeping as many points as possible.
// Throws PreconditionError when either side would be empty.
ReferenceSuite build_reference_suite(std::span<const SourceKernel> kernels, const ReferenceConfig& cfg);

enum class Augment { none, active, random, mutation };
std::string_view to_string(Augment a);
Augment augment_from_string(std::string_view name);

struct AugmentConfig {
  std::size_t epochs = 10;
  std::size_t tree_depth = 6;
  steering::SteeringConfig steering;
  active::ALConfig al;
  active::CommitteeConfig committee;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

// Steering settings used by the augmentation experiments.
steering::SteeringConfig experiment_steering();

struct AugmentRun {
  Augment strategy = Augment::none;
  std::vector<double> speedup;  // after 0..epochs epochs of augmentation
  downstream::EvalReport report;  // final
  active::ALResult al;
};

// Trains the heuristic on suite.train plus the points gathered by the
// strategy and evaluates it on suite.test after every epoch. `active` and
// `random` steer `gen`; `mutation` runs mutation search from the suite's
// training kernels toward committee-acquired targets. `gen` may be null for
// none and mutation; PreconditionError otherwise.
AugmentRun run_augmentation(Augment strategy, const ReferenceSuite& suite, const model::Generator* gen,
                            const AugmentConfig& cfg, const downstream::DeviceModel& model);

// epoch,<strategy speedups...>
void write_fig8_csv(const std::filesystem::path& path, std::span<const AugmentRun> runs);

}  // namespace steerbench::pipeline
