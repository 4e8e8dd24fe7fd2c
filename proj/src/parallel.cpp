#include "carmen/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace carmen {

int worker_count()
{
	if (const char* env = std::getenv("CARMEN_THREADS")) {
		try {
			const int n = std::stoi(env);
			if (n > 0) return n;
		} catch (const std::exception&) {
		}
	}
	return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
	const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n / 256 + 1);
	if (workers <= 1) {
		if (n > 0) body(0, n);
		return;
	}
	std::exception_ptr error;
	std::mutex error_mutex;
	std::vector<std::thread> threads;
	threads.reserve(workers);
	const std::size_t chunk = (n + workers - 1) / workers;
	for (std::size_t w = 0; w < workers; ++w) {
		const std::size_t begin = w * chunk;
		const std::size_t end = std::min(n, begin + chunk);
		if (begin >= end) break;
		threads.emplace_back([&, begin, end] {
			try {
				body(begin, end);
			} catch (...) {
				std::lock_guard<std::mutex> lock(error_mutex);
				if (!error) error = std::current_exception();
			}
		});
	}
	for (auto& t : threads) t.join();
	if (error) std::rethrow_exception(error);
}

} // namespace carmen
