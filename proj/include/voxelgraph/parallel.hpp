#pragma once

#include <cstddef>
#include <functional>

namespace voxelgraph {

/// Worker count used by internal loops. Read once from VOXELGRAPH_THREADS
/// (default 1) unless overridden with set_thread_count().
std::size_t thread_count();

/// Override the worker count for this process; 0 restores the env default.
void set_thread_count(std::size_t n);

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited by exactly one chunk, so callers that write only to per-index
/// outputs get results independent of the worker count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace voxelgraph
