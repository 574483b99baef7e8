#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autojournal/image.hpp"
#include "autojournal/ingest.hpp"

namespace autojournal::video {

using ingest::EpochMs;

struct Resolution {
  int width = 0;
  int height = 0;
  bool operator==(const Resolution&) const = default;
};

struct VideoSpec {
  double fps = 30.0;
  // Unset means the stream's modal resolution.
  std::optional<Resolution> resolution;
  bool timestamp_overlay = false;
  // Offset applied when rendering the overlay clock.
  int utc_offset_minutes = 0;
  bool lossless = false;
};

struct VideoArtifact {
  std::filesystem::path path;
  std::size_t frame_count = 0;
  double duration_s = 0.0;
  std::pair<EpochMs, EpochMs> covered_range{0, 0};
};

// What an encoder backend receives: frame images already letterboxed to
// width x height, in presentation order, each shown for 1/fps seconds.
struct EncodeJob {
  std::vector<std::filesystem::path> frames;
  std::filesystem::path frame_list;  // one absolute frame path per line
  std::filesystem::path frame_pattern;  // printf-style, e.g. dir/frame_%06d.png
  double fps = 30.0;
  int width = 0;
  int height = 0;
  bool lossless = false;
  std::filesystem::path output;
};

class Encoder {
 public:
  virtual ~Encoder() = default;
  // Throws Error(EncoderUnavailable) or Error(WriteFailed).
  virtual void encode(const EncodeJob& job) = 0;
};

enum class EncoderDialect {
  // autojournal-encode --fps F --frames LIST --output OUT [--lossless]
  Native,
  // ffmpeg -framerate F -i PATTERN ... OUT
  Ffmpeg,
};

// Runs an external encoder program as a child process.
class SubprocessEncoder : public Encoder {
 public:
  SubprocessEncoder(std::string program, EncoderDialect dialect);

  // Picks the dialect from the program name (ffmpeg* -> Ffmpeg).
  static std::unique_ptr<SubprocessEncoder> for_program(const std::string& program);

  void encode(const EncodeJob& job) override;
  std::vector<std::string> command_line(const std::filesystem::path& resolved,
                                        const EncodeJob& job) const;

 private:
  std::string program_;
  EncoderDialect dialect_;
};

// The bundled encoder beside the running executable, then PATH.
std::string default_encoder_program();

// Scales to fit inside the target while keeping aspect ratio; the rest is
// filled with black. Same-size input is returned unchanged.
RgbImage letterbox(const RgbImage& image, Resolution target);

// Burns a capture clock (YYYY-MM-DD HH:MM:SS) into the top-left corner.
void draw_timestamp(RgbImage& image, EpochMs capture_time, int utc_offset_minutes);

Resolution modal_resolution(const ingest::ScreenshotStream& stream);

// One video frame per screenshot in stream order, regardless of capture gaps.
VideoArtifact assemble(const ingest::ScreenshotStream& stream, const VideoSpec& spec,
                       const std::filesystem::path& out, Encoder& encoder);

}  // namespace autojournal::video
