#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "autojournal/image.hpp"
#include "autojournal/ingest.hpp"
#include "autojournal/journal.hpp"

namespace ajtest {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  fs::path path_;
};

// Deterministic image whose content depends on `seed` only.
autojournal::RgbImage pattern_image(int width, int height, std::uint32_t seed);

autojournal::ingest::Screenshot make_frame(autojournal::ingest::EpochMs t, const autojournal::RgbImage& image,
                                           std::size_t encoded_bytes = 1000);

void write_frame(const fs::path& dir, autojournal::ingest::EpochMs t, const autojournal::RgbImage& image);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

autojournal::journal::Journal make_journal(const std::vector<std::pair<std::string, std::string>>& events_feelings,
                                           autojournal::journal::StreamTag stream = autojournal::journal::StreamTag::Text);

// Random journal drawn from a small vocabulary so matches, partial overlaps and
// exact ties all occur.
autojournal::journal::Journal random_journal(std::mt19937_64& rng, std::size_t n,
                                             autojournal::journal::StreamTag stream);

// As above, but no two events share a bag of words, so self-matching has no
// ties to break.
autojournal::journal::Journal random_distinct_journal(std::mt19937_64& rng, std::size_t n,
                                                      autojournal::journal::StreamTag stream);

struct E2eFixture {
  fs::path root;
  fs::path config;
  std::vector<std::string> participants;
  std::vector<std::string> dates;
};

// 3 participants x 5 days of screenshots, ground truth, scripted mock
// responses and a config. Frames per day = frames_per_day.
E2eFixture build_e2e_fixture(const fs::path& root, int frames_per_day = 12, bool lossless = true);

// The bundled encoder; its location is baked in by the build.
std::string encoder_program();
std::string cli_program();

}  // namespace ajtest
