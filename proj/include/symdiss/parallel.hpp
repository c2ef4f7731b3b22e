#ifndef SYMDISS_PARALLEL_HPP
#define SYMDISS_PARALLEL_HPP

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace symdiss {

/* run body(lo, hi) over [0, total) in contiguous chunks, one per worker;
 * workers write disjoint index ranges so results are scheduling-independent */
inline void run_chunked(int total, const std::function<void(int, int)>& body) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (total > 0) workers = std::min(workers, static_cast<unsigned>(total));
  if (workers <= 1 || total < 64) {
    body(0, total);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (total + static_cast<int>(workers) - 1) / static_cast<int>(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(w) * chunk;
    const int hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace symdiss

#endif
