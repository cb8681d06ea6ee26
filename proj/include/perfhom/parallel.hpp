#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace perfhom {

/// Worker count used by grid kernels. Defaults to 1.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs body(begin, end) over a partition of [0, count) on the worker pool.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of partial(begin, end) over fixed blocks of `block` items. The block
/// layout does not depend on the thread count and partials are added in
/// block order, so the result is bitwise reproducible.
double ordered_sum(std::size_t count, std::size_t block,
                   const std::function<double(std::size_t, std::size_t)>& partial);

}  // namespace perfhom
