#include "autojournal/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <system_error>

#include "autojournal/error.hpp"
#include "autojournal/parallel.hpp"
#include "autojournal/simd.hpp"

namespace autojournal::ingest {

namespace fs = std::filesystem;

Screenshot::Screenshot(EpochMs capture_time, RgbImage image, std::string source_path,
                       std::size_t encoded_bytes)
    : capture_time_(capture_time),
      width_(image.width),
      height_(image.height),
      source_path_(std::move(source_path)),
      encoded_bytes_(encoded_bytes) {
  if (capture_time <= 0) {
    throw Error(ErrorCode::InvalidArgument, "capture_time must be positive: " + source_path_);
  }
  if (image.width <= 0 || image.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "non-positive dimensions: " + source_path_);
  }
  if (image.pixels.size() != image.pixel_count() * 3) {
    throw Error(ErrorCode::InvalidArgument, "raster size mismatch: " + source_path_);
  }
  raster_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(image.pixels));
}

bool Screenshot::same_raster(const Screenshot& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         (raster_ == other.raster_ || *raster_ == *other.raster_);
}

std::optional<EpochMs> TimestampRule::extract(const std::string& filename) const {
  const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
  std::smatch m;
  if (!std::regex_match(filename, m, re) || m.size() < 2) return std::nullopt;
  const std::string digits = m[1].str();
  EpochMs value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0) return std::nullopt;
  return value;
}

double pixel_similarity(const Screenshot& a, const Screenshot& b) {
  if (a.width() != b.width() || a.height() != b.height()) return 0.0;
  const std::size_t total = static_cast<std::size_t>(a.width()) * a.height();
  return static_cast<double>(simd::count_equal_rgb(a.pixels(), b.pixels())) /
         static_cast<double>(total);
}

void sort_frames(std::vector<Screenshot>& frames) {
  std::stable_sort(frames.begin(), frames.end(), [](const Screenshot& l, const Screenshot& r) {
    if (l.capture_time() != r.capture_time()) return l.capture_time() < r.capture_time();
    return l.source_path() < r.source_path();
  });
}

DedupResult dedup(const ScreenshotStream& stream, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dedup threshold must lie in (0, 1]");
  }
  if (stream.empty()) throw Error(ErrorCode::EmptyStream, "dedup of an empty stream");
  DedupResult out;
  out.stream.declared_interval_s = stream.declared_interval_s;
  out.stream.frames.reserve(stream.frames.size());
  out.stream.frames.push_back(stream.frames.front());
  for (std::size_t i = 1; i < stream.frames.size(); ++i) {
    const Screenshot& frame = stream.frames[i];
    if (pixel_similarity(out.stream.frames.back(), frame) >= threshold) {
      ++out.duplicates_dropped;
    } else {
      out.stream.frames.push_back(frame);
    }
  }
  return out;
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

struct Candidate {
  fs::path path;
  EpochMs capture_time;
  std::optional<Screenshot> frame;
};

}  // namespace

LoadResult load_stream(const fs::path& directory, const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::DirectoryUnreadable, directory.string());
  }
  std::vector<Candidate> candidates;
  fs::directory_iterator it(directory, ec);
  if (ec) throw Error(ErrorCode::DirectoryUnreadable, directory.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (!entry.is_regular_file(ec) || !has_image_extension(entry.path())) continue;
    const std::string name = entry.path().filename().string();
    const auto ts = options.timestamp_rule.extract(name);
    if (!ts) throw Error(ErrorCode::TimestampUnparseable, entry.path().string());
    candidates.push_back({entry.path(), *ts, std::nullopt});
  }
  // Directory iteration order is unspecified; impose one before anything else.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
    if (l.capture_time != r.capture_time) return l.capture_time < r.capture_time;
    return l.path.string() < r.path.string();
  });

  LoadResult result;
  result.stream.declared_interval_s = options.interval_s;
  result.stats.total_found = candidates.size();

  parallel_for(candidates.size(), options.workers, [&](std::size_t i) {
    Candidate& c = candidates[i];
    if (options.window && (c.capture_time < options.window->first ||
                           c.capture_time >= options.window->second)) {
      return;
    }
    std::error_code size_ec;
    const auto size = fs::file_size(c.path, size_ec);
    if (size_ec || size == 0) return;
    std::vector<std::uint8_t> bytes;
    try {
      bytes = read_file_bytes(c.path);
    } catch (const Error&) {
      return;
    }
    auto image = decode_image(bytes);
    if (!image) return;
    c.frame.emplace(c.capture_time, std::move(*image), c.path.string(), bytes.size());
  });

  // Modal dimensions; ties go to whichever size appears first in time order.
  std::map<std::pair<int, int>, std::size_t> counts;
  std::vector<std::pair<int, int>> first_seen;
  for (const auto& c : candidates) {
    if (!c.frame) continue;
    const auto key = std::make_pair(c.frame->width(), c.frame->height());
    if (counts[key]++ == 0) first_seen.push_back(key);
  }
  if (first_seen.empty()) throw Error(ErrorCode::NoValidFrames, directory.string());
  std::pair<int, int> modal = first_seen.front();
  for (const auto& key : first_seen) {
    if (counts[key] > counts[modal]) modal = key;
  }

  std::vector<Screenshot> valid;
  for (auto& c : candidates) {
    if (!c.frame) continue;
    if (std::abs(c.frame->width() - modal.first) > options.dimension_tolerance_px ||
        std::abs(c.frame->height() - modal.second) > options.dimension_tolerance_px) {
      c.frame.reset();
      continue;
    }
    valid.push_back(std::move(*c.frame));
  }
  result.stats.invalid_dropped = candidates.size() - valid.size();
  sort_frames(valid);

  ScreenshotStream sorted{std::move(valid), options.interval_s};
  auto deduped = dedup(sorted, options.dedup_threshold);
  result.stream = std::move(deduped.stream);
  result.stats.duplicates_dropped = deduped.duplicates_dropped;
  result.stats.retained = result.stream.size();
  return result;
}

}  // namespace autojournal::ingest
