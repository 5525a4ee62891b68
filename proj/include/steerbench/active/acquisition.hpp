#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerbench/active/committee.hpp"
#include "steerbench/steering/beam.hpp"

namespace steerbench::active {

// Per-dimension sampling box.
struct Bounds {
  FeatureSpace space = FeatureSpace::grewe;
  std::vector<double> lo, hi;

  void check() const;
  nlohmann::ordered_json to_json() const;
};

// [0, scale * max] per dimension over `points`; a dimension whose maximum
// is 0 gets [0, 1].
Bounds default_bounds(std::span<const LabeledPoint> points, double scale = 1.5);

// n uniform points inside `bounds`, one rng draw per coordinate in order.
std::vector<FeatureVector> sample_points(std::size_t n, const Bounds& bounds, Rng& rng);

struct Acquisition {
  FeatureVector point{FeatureSpace::grewe};
  CommitteeReport report;
  std::size_t index = 0;  // position in the sampled set
};

// Highest-entropy point of `candidates` (first on ties). Throws
// PreconditionError on an empty list.
Acquisition most_uncertain(const Committee& committee, std::span<const FeatureVector> candidates);

// Samples n_random points and returns the most uncertain one.
Acquisition acquire(const Committee& committee, std::size_t n_random, const Bounds& bounds, Rng& rng);

struct ALConfig {
  std::size_t n_random = 4096;
  double bound_scale = 1.5;
  std::size_t probe_points = 256;
  bool random_targets = false;  // passive baseline: first sample instead of argmax
  std::uint64_t seed = 0;

  void check() const;
  nlohmann::ordered_json to_json() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  FeatureVector target{FeatureSpace::grewe};
  double entropy_before = 0.0;  // committee entropy at the target before the update
  double entropy_after = 0.0;
  std::optional<double> achieved_dist;  // empty when the epoch was skipped
  std::string best_kernel;
  std::size_t new_points = 0;
  double mean_probe_entropy = 0.0;  // after the epoch
  std::string error;

  bool skipped() const { return !achieved_dist.has_value(); }
  nlohmann::ordered_json to_json() const;
};

struct ALResult {
  std::vector<LabeledPoint> labeled;  // committee training set at the end
  std::vector<EpochLog> log;
  std::vector<FeatureVector> probes;
  std::vector<std::vector<double>> probe_entropy;  // [0] before any epoch, then one row per epoch

  nlohmann::ordered_json log_json() const;
  // epoch,probe,<dims...>,entropy
  void write_probe_csv(const std::filesystem::path& path) const;
};

using SteerFn = std::function<steering::Trajectory(const FeatureVector& target, std::size_t epoch)>;
using LabelFn = std::function<std::vector<LabeledPoint>(const steering::Candidate&)>;

// Each epoch: acquire a target, steer toward it, label the unique kernels
// on the best-so-far path and in the final top-K, update the committee. EmptyGenerationError from
// `steer` skips the epoch. Bounds come from the committee's initial set.
ALResult al_loop(Committee& committee, const SteerFn& steer, const LabelFn& label, std::size_t epochs,
                 const ALConfig& cfg);

// Mean entropy of the committee over `probes`.
double mean_entropy(const Committee& committee, std::span<const FeatureVector> probes);

}  // namespace steerbench::active
