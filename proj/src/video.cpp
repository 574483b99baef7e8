#include "autojournal/video.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "autojournal/error.hpp"
#include "autojournal/subprocess.hpp"
#include "autojournal/timefmt.hpp"

namespace autojournal::video {

namespace fs = std::filesystem;

SubprocessEncoder::SubprocessEncoder(std::string program, EncoderDialect dialect)
    : program_(std::move(program)), dialect_(dialect) {}

std::unique_ptr<SubprocessEncoder> SubprocessEncoder::for_program(const std::string& program) {
  const std::string name = fs::path(program).filename().string();
  const auto dialect = name.rfind("ffmpeg", 0) == 0 ? EncoderDialect::Ffmpeg : EncoderDialect::Native;
  return std::make_unique<SubprocessEncoder>(program, dialect);
}

std::vector<std::string> SubprocessEncoder::command_line(const fs::path& resolved,
                                                         const EncodeJob& job) const {
  char fps[32];
  std::snprintf(fps, sizeof fps, "%.6g", job.fps);
  if (dialect_ == EncoderDialect::Native) {
    std::vector<std::string> argv{resolved.string(), "--fps", fps, "--frames", job.frame_list.string(),
                                  "--output", job.output.string()};
    if (job.lossless) argv.emplace_back("--lossless");
    return argv;
  }
  std::vector<std::string> argv{resolved.string(), "-y", "-loglevel", "error", "-framerate", fps,
                                "-i", job.frame_pattern.string(), "-fflags", "+bitexact",
                                "-flags:v", "+bitexact", "-threads", "1"};
  if (job.lossless) {
    argv.insert(argv.end(), {"-c:v", "libx264rgb", "-qp", "0", "-pix_fmt", "rgb24"});
  } else {
    argv.insert(argv.end(), {"-c:v", "libx264", "-crf", "18", "-pix_fmt", "yuv420p", "-vf",
                             "pad=ceil(iw/2)*2:ceil(ih/2)*2"});
  }
  argv.push_back(job.output.string());
  return argv;
}

void SubprocessEncoder::encode(const EncodeJob& job) {
  const auto resolved = find_executable(program_);
  if (!resolved) throw Error(ErrorCode::EncoderUnavailable, "encoder not found: " + program_);
  const auto result = run_process(command_line(*resolved, job));
  if (result.exit_code == 127) {
    throw Error(ErrorCode::EncoderUnavailable, program_ + ": " + result.output);
  }
  std::error_code ec;
  if (result.exit_code != 0 || !fs::is_regular_file(job.output, ec)) {
    throw Error(ErrorCode::WriteFailed, job.output.string() + ": encoder exited with " +
                                            std::to_string(result.exit_code) + ": " + result.output);
  }
}

std::string default_encoder_program() {
  if (const auto dir = current_executable_dir()) {
    const auto sibling = *dir / "autojournal-encode";
    if (find_executable(sibling.string())) return sibling.string();
  }
  return "autojournal-encode";
}

RgbImage letterbox(const RgbImage& image, Resolution target) {
  if (image.width == target.width && image.height == target.height) return image;
  RgbImage out{target.width, target.height,
               std::vector<std::uint8_t>(static_cast<std::size_t>(target.width) * target.height * 3, 0)};
  const double scale = std::min(static_cast<double>(target.width) / image.width,
                                static_cast<double>(target.height) / image.height);
  const int w = std::clamp(static_cast<int>(std::lround(image.width * scale)), 1, target.width);
  const int h = std::clamp(static_cast<int>(std::lround(image.height * scale)), 1, target.height);
  const int x0 = (target.width - w) / 2;
  const int y0 = (target.height - h) / 2;
  // Bilinear sampling at pixel centres.
  for (int y = 0; y < h; ++y) {
    const double sy = std::clamp((y + 0.5) / scale - 0.5, 0.0, image.height - 1.0);
    const int iy = static_cast<int>(sy);
    const int iy1 = std::min(iy + 1, image.height - 1);
    const double fy = sy - iy;
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp((x + 0.5) / scale - 0.5, 0.0, image.width - 1.0);
      const int ix = static_cast<int>(sx);
      const int ix1 = std::min(ix + 1, image.width - 1);
      const double fx = sx - ix;
      for (int c = 0; c < 3; ++c) {
        auto at = [&](int xx, int yy) {
          return static_cast<double>(image.pixels[(static_cast<std::size_t>(yy) * image.width + xx) * 3 + c]);
        };
        const double top = at(ix, iy) * (1 - fx) + at(ix1, iy) * fx;
        const double bottom = at(ix, iy1) * (1 - fx) + at(ix1, iy1) * fx;
        const double v = top * (1 - fy) + bottom * fy;
        out.pixels[(static_cast<std::size_t>(y + y0) * target.width + (x + x0)) * 3 + c] =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

namespace {

// 5x7 glyphs, one byte per row, low 5 bits used (bit 4 = leftmost column).
const std::array<std::uint8_t, 7>* glyph(char c) {
  static const std::map<char, std::array<std::uint8_t, 7>> font = {
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
      {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
      {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
      {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
      {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
      {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
      {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
      {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
  };
  const auto it = font.find(c);
  return it == font.end() ? nullptr : &it->second;
}

}  // namespace

void draw_timestamp(RgbImage& image, EpochMs capture_time, int utc_offset_minutes) {
  const std::string text = format_datetime(capture_time, utc_offset_minutes);
  const int scale = std::max(1, image.height / 240);
  const int advance = 6 * scale;
  const int box_w = std::min(image.width, static_cast<int>(text.size()) * advance + 2 * scale);
  const int box_h = std::min(image.height, 9 * scale);
  auto put = [&](int x, int y, std::uint8_t v) {
    if (x < 0 || y < 0 || x >= image.width || y >= image.height) return;
    auto* p = &image.pixels[(static_cast<std::size_t>(y) * image.width + x) * 3];
    p[0] = p[1] = p[2] = v;
  };
  for (int y = 0; y < box_h; ++y)
    for (int x = 0; x < box_w; ++x) put(x, y, 0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto* g = glyph(text[i]);
    if (g == nullptr) continue;
    const int ox = scale + static_cast<int>(i) * advance;
    for (int row = 0; row < 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        if (((*g)[row] >> (4 - col)) & 1) {
          for (int dy = 0; dy < scale; ++dy)
            for (int dx = 0; dx < scale; ++dx) put(ox + col * scale + dx, scale + row * scale + dy, 255);
        }
      }
    }
  }
}

Resolution modal_resolution(const ingest::ScreenshotStream& stream) {
  std::map<std::pair<int, int>, std::size_t> counts;
  Resolution best{};
  std::size_t best_count = 0;
  for (const auto& f : stream.frames) {
    const std::size_t c = ++counts[{f.width(), f.height()}];
    if (c > best_count) {
      best_count = c;
      best = {f.width(), f.height()};
    }
  }
  return best;
}

VideoArtifact assemble(const ingest::ScreenshotStream& stream, const VideoSpec& spec,
                       const fs::path& out, Encoder& encoder) {
  if (stream.empty()) throw Error(ErrorCode::EmptyStream, "assemble of an empty stream");
  if (!(spec.fps > 0)) throw Error(ErrorCode::InvalidArgument, "fps must be positive");
  const Resolution target = spec.resolution.value_or(modal_resolution(stream));
  if (target.width <= 0 || target.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  }

  std::error_code ec;
  if (out.has_parent_path()) fs::create_directories(out.parent_path(), ec);
  if (ec) throw Error(ErrorCode::WriteFailed, out.string() + ": " + ec.message());
  const fs::path frame_dir = out.string() + ".frames";
  fs::remove_all(frame_dir, ec);
  if (!fs::create_directories(frame_dir, ec) || ec) {
    throw Error(ErrorCode::WriteFailed, frame_dir.string());
  }
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ignored;
      fs::remove_all(dir, ignored);
    }
  } cleanup{frame_dir};

  EncodeJob job;
  job.fps = spec.fps;
  job.width = target.width;
  job.height = target.height;
  job.lossless = spec.lossless;
  job.output = fs::absolute(out);
  job.frame_list = fs::absolute(frame_dir / "frames.txt");
  job.frame_pattern = fs::absolute(frame_dir / "frame_%06d.png");

  std::ofstream list(job.frame_list);
  if (!list) throw Error(ErrorCode::WriteFailed, job.frame_list.string());
  for (std::size_t i = 0; i < stream.frames.size(); ++i) {
    const auto& shot = stream.frames[i];
    RgbImage frame = letterbox(shot.image(), target);
    if (spec.timestamp_overlay) draw_timestamp(frame, shot.capture_time(), spec.utc_offset_minutes);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.png", i);
    const fs::path path = fs::absolute(frame_dir / name);
    write_png(frame, path);
    list << path.string() << '\n';
    job.frames.push_back(path);
  }
  list.close();
  if (!list) throw Error(ErrorCode::WriteFailed, job.frame_list.string());

  fs::remove(out, ec);
  encoder.encode(job);

  VideoArtifact artifact;
  artifact.path = out;
  artifact.frame_count = stream.frames.size();
  artifact.duration_s = static_cast<double>(artifact.frame_count) / spec.fps;
  artifact.covered_range = {stream.frames.front().capture_time(), stream.frames.back().capture_time()};
  return artifact;
}

}  // namespace autojournal::video
