#include "gean/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace gean {

namespace {
std::atomic<bool> g_parallel{true};

bool init_from_env() {
  const char* v = std::getenv("GEAN_SERIAL");
  if (v != nullptr && std::strcmp(v, "0") != 0) g_parallel = false;
  return true;
}
const bool g_init = init_from_env();
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel_enabled(bool on) {
  g_parallel.store(on, std::memory_order_relaxed);
}

}  // namespace gean
