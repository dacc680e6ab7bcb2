#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace rkam {

template <class Fn>
void parallel_for(size_t count, Fn&& fn) {
  const size_t workers = std::min<size_t>(static_cast<size_t>(num_threads()), count);
  if (workers <= 1) {
    if (count > 0) fn(size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const size_t chunk = (count + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        if (begin < end) fn(begin, end);
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

}  // namespace rkam
