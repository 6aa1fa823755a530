#pragma once

// Mapping of free-form "--key value" command-line arguments onto a JobSpec.
//
//   --model K, --radius, --twist, --mass2, --metric, --dim, --length,
//   --left, --right, --left-s, --right-s, --field, --frame   -> [model]
//   --plus-<model key>, --minus-<model key>                  -> [model.plus], [model.minus]
//   --t --s --beta --mu --q --eps --b (comma lists)          -> [grid]
//   --rel-tol, --accept                                      -> [tolerances]
//   anything else                                            -> [params]
//
// Dashes in keys become underscores. A key followed by another key (or by
// nothing) is a flag with value "true". A leading bare word is the action.

#include <string>
#include <vector>

#include "speclab_cli/jobspec.hpp"

namespace speclab::cli {

/// Merges the arguments into `job` (entries given on the command line win).
void apply_args(JobSpec& job, const std::vector<std::string>& args);

}  // namespace speclab::cli
