#include "autojournal/chunker.hpp"

#include <numeric>

#include "autojournal/error.hpp"

namespace autojournal::chunking {

std::size_t Chunk::payload_bytes() const {
  return std::accumulate(frames.begin(), frames.end(), std::size_t{0},
                         [](std::size_t acc, const Screenshot& s) { return acc + s.encoded_bytes(); });
}

std::vector<Chunk> chunk_stream(const ingest::ScreenshotStream& stream, const ChunkLimits& limits) {
  if (stream.empty()) throw Error(ErrorCode::EmptyStream, "chunk_stream of an empty stream");
  if (limits.max_images < 1) throw Error(ErrorCode::InvalidArgument, "max_images must be >= 1");

  std::vector<Chunk> chunks;
  Chunk current;
  std::size_t current_bytes = 0;
  auto close = [&] {
    current.start_time = current.frames.front().capture_time();
    current.end_time = current.frames.back().capture_time();
    current.ordinal = chunks.size();
    chunks.push_back(std::move(current));
    current = Chunk{};
    current_bytes = 0;
  };

  for (const Screenshot& frame : stream.frames) {
    const std::size_t size = frame.encoded_bytes();
    if (size > limits.max_bytes) {
      throw Error(ErrorCode::FrameExceedsLimit,
                  frame.source_path() + " (" + std::to_string(size) + " bytes > " +
                      std::to_string(limits.max_bytes) + ")");
    }
    if (!current.frames.empty() &&
        (current.frames.size() + 1 > limits.max_images || current_bytes + size > limits.max_bytes)) {
      close();
    }
    current.frames.push_back(frame);
    current_bytes += size;
  }
  close();
  return chunks;
}

}  // namespace autojournal::chunking
