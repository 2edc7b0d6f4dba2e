#pragma once

#include <string>

#include "invex/problems/dag.hpp"
#include "invex/problems/fair_lasso.hpp"
#include "invex/problems/mlr.hpp"

namespace invex {

/// JSON layout: {"problem": ..., "dims": {...}, "seed": ..., "params": {...},
/// "arrays": {...}} with dense arrays stored row-major. Numbers round-trip
/// bit-faithfully.
std::string to_json(const dag::DagInstance& inst);
std::string to_json(const fairlasso::FairLassoInstance& inst);
std::string to_json(const mlr::MlrInstance& inst);

dag::DagInstance dag_from_json(const std::string& text);
fairlasso::FairLassoInstance fairlasso_from_json(const std::string& text);
mlr::MlrInstance mlr_from_json(const std::string& text);

}  // namespace invex
