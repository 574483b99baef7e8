#pragma once

#include <cstddef>
#include <vector>

#include "autojournal/ingest.hpp"

namespace autojournal::chunking {

using ingest::EpochMs;
using ingest::Screenshot;

struct Chunk {
  std::vector<Screenshot> frames;
  EpochMs start_time = 0;
  EpochMs end_time = 0;
  std::size_t ordinal = 0;

  std::size_t payload_bytes() const;
};

struct ChunkLimits {
  std::size_t max_images = 50;
  std::size_t max_bytes = 20'000'000;
};

// Greedy left-to-right packing: a chunk closes as soon as the next frame
// would break either limit. Byte budgets count encoded (on-disk) sizes.
std::vector<Chunk> chunk_stream(const ingest::ScreenshotStream& stream, const ChunkLimits& limits);

}  // namespace autojournal::chunking
