#include "voxelgraph/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace voxelgraph {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_thread_count() {
  static const std::size_t value = [] {
    const char* raw = std::getenv("VOXELGRAPH_THREADS");
    if (raw == nullptr) return std::size_t{1};
    std::size_t parsed = 0;
    const char* end = raw + std::strlen(raw);
    auto [ptr, ec] = std::from_chars(raw, end, parsed);
    if (ec != std::errc{} || ptr != end || parsed == 0) return std::size_t{1};
    return parsed;
  }();
  return value;
}

// Below this many indices per worker the thread start-up dominates.
constexpr std::size_t kMinChunk = 256;

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load(std::memory_order_relaxed);
  return o != 0 ? o : env_thread_count();
}

void set_thread_count(std::size_t n) {
  g_override.store(n, std::memory_order_relaxed);
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min(thread_count(), std::max<std::size_t>(1, n / kMinChunk));
  if (workers <= 1) {
    body(0, n);
    return;
  }

  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace voxelgraph
