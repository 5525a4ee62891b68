#pragma once

#include "steerbench/features/feature_vector.hpp"
#include "steerbench/frontend/ast.hpp"

namespace steerbench::features {

// Syntax-level features in the style of Grewe et al. (8 dimensions):
//   comp       arithmetic/logical binary operators + sqrt/fabs/min/max calls
//   rational   relational operators
//   atomic     atomic_add calls
//   mem        array element accesses (loads and stores, including the
//              element named inside &a[i])
//   localmem   accesses through local-qualified pointer parameters
//   coalesced  accesses whose subscript is exactly get_global_id(0)
//   comp/mem and coalesced/mem, 0 when mem is 0
// The kernel is expected to validate; identifier names never matter.
FeatureVector extract_grewe(const frontend::Ast& ast);

}  // namespace steerbench::features
