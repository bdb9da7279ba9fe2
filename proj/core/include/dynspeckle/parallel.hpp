#pragma once

#include <cstddef>
#include <functional>

namespace dynspeckle {

/// 0 means "one per hardware thread".
unsigned resolve_thread_count(unsigned requested);

/// Splits [begin, end) into at most `threads` contiguous chunks and calls
/// `body(chunk_begin, chunk_end)` for each, on worker threads when more than
/// one chunk exists. Chunk boundaries depend only on (begin, end, threads).
void parallel_for(std::size_t begin, std::size_t end, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dynspeckle
