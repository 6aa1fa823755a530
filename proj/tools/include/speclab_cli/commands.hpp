#pragma once

// Subcommand dispatch: JobSpec in, result rows out.

#include <cstddef>
#include <functional>
#include <vector>

#include "speclab_cli/jobspec.hpp"
#include "speclab_cli/output.hpp"

namespace speclab::cli {

/// Worker count from SPECLAB_THREADS (default: hardware concurrency, at least 1).
int thread_count();

/// Evaluates f(0..count-1) on `threads` workers into indexed slots. The
/// exception of the lowest failing index is rethrown.
std::vector<Row> parallel_rows(std::size_t count, const std::function<Row(std::size_t)>& f, int threads);

/// Runs a validated job. Throws speclab::Error; keys the command does not
/// consume are reported as InvalidArgument.
Output run(const JobSpec& job, int threads);

}  // namespace speclab::cli
