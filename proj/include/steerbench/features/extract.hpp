#pragma once

#include "steerbench/features/feature_vector.hpp"
#include "steerbench/features/grewe.hpp"
#include "steerbench/features/ir.hpp"

namespace steerbench::features {

// Features of a validated kernel in the requested space.
inline FeatureVector extract(const frontend::Ast& ast, FeatureSpace space) {
  return space == FeatureSpace::grewe ? extract_grewe(ast) : extract_ircount(lower_to_ir(ast));
}

}  // namespace steerbench::features
