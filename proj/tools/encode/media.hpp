#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace autojournal::media {

struct EncodeOptions {
  double fps = 30.0;
  bool lossless = false;
};

// Encodes same-sized PNG/JPEG frames into a container chosen from the output
// extension. Lossless mode uses RGB H.264 at qp 0; otherwise YUV 4:2:0 H.264.
void encode_frames(const std::vector<std::filesystem::path>& frames, const std::filesystem::path& out,
                   const EncodeOptions& options);

struct ProbeResult {
  std::size_t decoded_frames = 0;
  double duration_s = 0.0;
  double fps = 0.0;
  int width = 0;
  int height = 0;
  std::string codec;
  // FNV-1a 64 over each decoded frame's RGB24 raster.
  std::vector<std::uint64_t> frame_checksums;
};

ProbeResult probe(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n);

}  // namespace autojournal::media
