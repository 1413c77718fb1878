#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace eutherm {

// Worker cap from GENERIC_NUM_THREADS; defaults to 1 so results stay
// bit-reproducible unless the user opts in. Only pointwise maps are
// parallelized; reductions and FFTs stay serial.
inline int num_threads() {
  static int n = [] {
    const char* s = std::getenv("GENERIC_NUM_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    if (v < 1) return 1;
    return std::min(v, static_cast<int>(std::thread::hardware_concurrency()));
  }();
  return n;
}

template <class F>
void parallel_for(size_t n, F&& fn) {
  const int nt = num_threads();
  if (nt <= 1 || n < 256) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> ts;
  std::exception_ptr err;
  std::mutex err_mu;
  const size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    ts.emplace_back([lo, hi, &fn, &err, &err_mu] {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : ts) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace eutherm
