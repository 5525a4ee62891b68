#pragma once

#include <optional>
#include <span>

#include "steerbench/steering/beam.hpp"

namespace steerbench::steering {

enum class MutationKind { duplicate_statement, delete_statement, swap_operator, replace_digit, toggle_index };
std::string_view to_string(MutationKind kind);

// Applies one random edit. With `kind` set, only that edit is attempted;
// the kernel comes back unchanged when the edit has no site. The result is
// not guaranteed to validate. Throws PreconditionError if `kernel` does not
// validate.
SourceKernel mutate(const SourceKernel& kernel, Rng& rng, std::optional<MutationKind> kind = std::nullopt);

// Beam search with mutate() in place of infilling. Invalid seeds are
// skipped; throws EmptyGenerationError if none validate.
Trajectory mutation_search(std::span<const SourceKernel> seeds, const FeatureVector& target,
                           const SteeringConfig& cfg);

}  // namespace steerbench::steering
