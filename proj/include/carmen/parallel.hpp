#ifndef CARMEN_PARALLEL_HPP
#define CARMEN_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>

namespace carmen {

/// Worker count: CARMEN_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). The first exception
/// thrown by any chunk is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace carmen

#endif
