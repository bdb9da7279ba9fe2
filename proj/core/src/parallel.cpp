#include "dynspeckle/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dynspeckle {

unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t begin, std::size_t end, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t chunks = std::min<std::size_t>(resolve_thread_count(threads), n);
  if (chunks <= 1) {
    body(begin, end);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(chunks - 1);
    auto run = [&](std::size_t lo, std::size_t hi) {
      try {
        body(lo, hi);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    for (std::size_t c = 1; c < chunks; ++c) {
      workers.emplace_back(run, begin + n * c / chunks, begin + n * (c + 1) / chunks);
    }
    run(begin, begin + n / chunks);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dynspeckle
