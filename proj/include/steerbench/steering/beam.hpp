#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"
#include "steerbench/features/feature_vector.hpp"
#include "steerbench/frontend/frontend.hpp"
#include "steerbench/model/generator.hpp"

namespace steerbench::steering {

using features::FeatureSpace;
using features::FeatureVector;
using frontend::SourceKernel;

struct SteeringConfig {
  std::size_t beam_width = 8;             // K
  std::size_t depth = 20;                 // generations after the seed generation
  std::size_t samples_per_candidate = 8;
  std::size_t seed_samples = 64;          // infills of the fixed feed in generation 0
  double replace_probability = 0.15;      // p
  double temperature = 0.8;
  std::size_t max_infill_steps = 128;
  double max_hole_ratio = 0.9;
  std::uint64_t seed = 0;

  void check() const;
  nlohmann::ordered_json to_json() const;
  static SteeringConfig from_json(const nlohmann::json& doc);
};

struct Candidate {
  SourceKernel kernel;        // canonical text
  FeatureVector features;
  double dist = 0.0;
  std::size_t generation = 0;
  std::size_t token_length = 0;

  nlohmann::ordered_json to_json() const;
};

// Validates `text` and scores it against `target`; nullopt when invalid.
std::optional<Candidate> make_candidate(std::string_view text, frontend::Origin origin, const FeatureVector& target,
                                        std::size_t generation);

struct GenerationStats {
  std::size_t generation = 0;
  std::size_t attempts = 0;      // samples drawn
  std::size_t valid_count = 0;   // unique validating candidates kept
  double best_dist = 0.0;
  double mean_dist = 0.0;
  double best_so_far = 0.0;
};

enum class Termination { exact_match, depth_exhausted };
std::string_view to_string(Termination t);

struct Trajectory {
  FeatureVector target{FeatureSpace::grewe};
  SteeringConfig config;
  std::vector<std::vector<Candidate>> generations;
  std::vector<GenerationStats> stats;
  std::vector<Candidate> best_path;  // best-so-far candidate after each generation
  Termination termination = Termination::depth_exhausted;

  bool empty() const { return generations.empty(); }
  const Candidate& best() const;
  nlohmann::ordered_json to_json() const;
  // generation,attempts,valid_count,best_dist,mean_dist,best_so_far
  void write_csv(const std::filesystem::path& path) const;
};

// Raised when a generation yields no validating kernel. Carries everything
// produced before the failure.
class EmptyGenerationError : public Error {
 public:
  EmptyGenerationError(const std::string& what, Trajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

// seed_samples infills of "kernel void [HOLE]"; keeps unique validating
// kernels. Throws EmptyGenerationError when none validate.
std::vector<Candidate> seed_generation(const model::Generator& gen, const FeatureVector& target,
                                       const SteeringConfig& cfg, Rng& rng);

struct Selection {
  std::vector<Candidate> survivors;
  std::vector<bool> replaced;  // per slot
};

// Top-K by (dist, token_length, text), then each slot independently swapped
// with probability p for a uniformly drawn non-survivor. Drawn replacements
// leave the pool. Throws PreconditionError on an empty list.
Selection select_top_k(std::span<const Candidate> candidates, std::size_t k, double p, Rng& rng);

// samples_per_candidate children, each from one random hole in the
// parent's encoding followed by infilling. Invalid children are dropped.
std::vector<Candidate> expand(const Candidate& parent, const model::Generator& gen, const FeatureVector& target,
                              const SteeringConfig& cfg, std::size_t generation, Rng& rng);

// Beam search from the seed generation. Throws EmptyGenerationError with
// the partial trajectory when a generation comes out empty.
Trajectory steer(const model::Generator& gen, const FeatureVector& target, const SteeringConfig& cfg);

// Shared beam loop: `produce` creates the children of one survivor.
using ExpandFn = std::function<std::vector<Candidate>(const Candidate&, std::size_t generation, Rng&)>;
Trajectory beam_search(std::vector<Candidate> seeds, std::size_t seed_attempts, const FeatureVector& target,
                       const SteeringConfig& cfg, const ExpandFn& produce, Rng& rng);

}  // namespace steerbench::steering
