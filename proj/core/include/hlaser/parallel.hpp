#pragma once

#include <cstddef>
#include <type_traits>
#include <vector>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace hlaser {

// Caps the worker pool for the rest of the process; n <= 0 restores the default.
void set_max_threads(int n);
int max_threads();

// Work-stealing map over [0, count). Results are stored by index, so the
// output does not depend on scheduling.
template <class F>
auto parallel_map(std::size_t count, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  std::vector<std::invoke_result_t<F&, std::size_t>> out(count);
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) out[i] = f(i);
  });
  return out;
}

}  // namespace hlaser
