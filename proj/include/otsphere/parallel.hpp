#pragma once

#include <cstddef>
#include <exception>

namespace otsphere {

/// Selects the OpenMP kernel or the serial reference loop it is tested against.
enum class Exec { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Under Exec::Parallel the first exception
/// thrown by any iteration is rethrown after the loop.
template <typename Fn>
void for_each_index(std::ptrdiff_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(otsphere_for_each_index)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace otsphere
