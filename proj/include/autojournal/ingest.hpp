#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autojournal/image.hpp"

namespace autojournal::ingest {

using EpochMs = std::int64_t;

// One captured frame. The raster is shared and immutable, so copies are cheap
// and safe to pass between threads.
class Screenshot {
 public:
  // Throws Error(InvalidArgument) when an invariant is violated.
  Screenshot(EpochMs capture_time, RgbImage image, std::string source_path,
             std::size_t encoded_bytes = 0);

  EpochMs capture_time() const { return capture_time_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return *raster_; }
  const std::string& source_path() const { return source_path_; }
  // Size of the file as stored on disk; used by the chunker's payload budget.
  std::size_t encoded_bytes() const { return encoded_bytes_; }

  RgbImage image() const { return RgbImage{width_, height_, *raster_}; }

  bool same_raster(const Screenshot& other) const;

 private:
  EpochMs capture_time_;
  int width_;
  int height_;
  std::shared_ptr<const std::vector<std::uint8_t>> raster_;
  std::string source_path_;
  std::size_t encoded_bytes_;
};

struct ScreenshotStream {
  std::vector<Screenshot> frames;
  double declared_interval_s = 3.0;

  bool empty() const { return frames.empty(); }
  std::size_t size() const { return frames.size(); }
};

struct IngestStats {
  std::size_t total_found = 0;
  std::size_t invalid_dropped = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t retained = 0;

  bool consistent() const {
    return retained + invalid_dropped + duplicates_dropped == total_found;
  }
};

// Extracts epoch milliseconds from a file name. The pattern is an ECMAScript
// regex matched against the whole file name; capture group 1 is the value.
struct TimestampRule {
  std::string pattern = R"(^(\d+)\.(png|jpe?g)$)";

  std::optional<EpochMs> extract(const std::string& filename) const;
};

struct IngestOptions {
  TimestampRule timestamp_rule;
  double dedup_threshold = 1.0;
  double interval_s = 3.0;
  // Frames whose width or height differ from the modal dimensions by more
  // than this many pixels are invalid.
  int dimension_tolerance_px = 0;
  // Half-open [begin, end) capture window; frames outside it are invalid.
  std::optional<std::pair<EpochMs, EpochMs>> window;
  std::size_t workers = 1;
};

struct LoadResult {
  ScreenshotStream stream;
  IngestStats stats;
};

// Reads every .png/.jpg/.jpeg file in `directory`, drops invalid frames,
// sorts by (capture_time, source_path) and removes consecutive duplicates.
LoadResult load_stream(const std::filesystem::path& directory, const IngestOptions& options = {});

// Fraction of pixels whose three channels coincide; 0 when dimensions differ.
double pixel_similarity(const Screenshot& a, const Screenshot& b);

struct DedupResult {
  ScreenshotStream stream;
  std::size_t duplicates_dropped = 0;
};

// Drops a frame when its similarity to the last retained frame reaches
// `threshold`. The first frame is always kept.
DedupResult dedup(const ScreenshotStream& stream, double threshold = 1.0);

void sort_frames(std::vector<Screenshot>& frames);

}  // namespace autojournal::ingest
