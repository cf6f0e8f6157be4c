#include "hlaser/parallel.hpp"

#include <memory>
#include <mutex>

#include <tbb/global_control.h>

namespace hlaser {
namespace {
std::mutex g_mutex;
std::unique_ptr<tbb::global_control> g_control;
}  // namespace

void set_max_threads(int n) {
  std::lock_guard lock(g_mutex);
  g_control.reset();
  if (n > 0) {
    g_control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<std::size_t>(n));
  }
}

int max_threads() {
  return static_cast<int>(tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism));
}

}  // namespace hlaser
