#pragma once

#include <cstddef>
#include <functional>

namespace handover {

/// Worker count for internal parallel loops. Reads HANDOVER_OPT_THREADS
/// (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across up to `workers` threads. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome never depends on scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace handover
