#include "perfhom/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace perfhom {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_num_threads(unsigned n) { g_threads = std::max(1u, n); }

unsigned num_threads() { return g_threads; }

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(g_threads.load(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = std::min(count, w * chunk);
    const std::size_t e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, std::min(count, chunk));
}

double ordered_sum(std::size_t count, std::size_t block,
                   const std::function<double(std::size_t, std::size_t)>& partial) {
  block = std::max<std::size_t>(block, 1);
  const std::size_t nblocks = (count + block - 1) / block;
  std::vector<double> parts(nblocks, 0.0);
  parallel_for(nblocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      parts[b] = partial(b * block, std::min(count, (b + 1) * block));
    }
  });
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace perfhom
