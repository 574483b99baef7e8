#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "autojournal/timefmt.hpp"
#include "oracle.hpp"

namespace ajtest {

using namespace autojournal;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("aj_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

RgbImage pattern_image(int width, int height, std::uint32_t seed) {
  RgbImage img{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3)};
  std::uint32_t x = seed * 2654435761u + 12345u;
  for (auto& b : img.pixels) {
    x ^= x << 13;
    x ^= x >> 17;
    x ^= x << 5;
    b = static_cast<std::uint8_t>(x >> 24);
  }
  return img;
}

ingest::Screenshot make_frame(ingest::EpochMs t, const RgbImage& image, std::size_t encoded_bytes) {
  return ingest::Screenshot(t, image, "mem/" + std::to_string(t) + ".png", encoded_bytes);
}

void write_frame(const fs::path& dir, ingest::EpochMs t, const RgbImage& image) {
  fs::create_directories(dir);
  write_png(image, dir / (std::to_string(t) + ".png"));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

journal::Journal make_journal(const std::vector<std::pair<std::string, std::string>>& events_feelings,
                              journal::StreamTag stream) {
  journal::Journal j;
  j.stream = stream;
  for (std::size_t i = 0; i < events_feelings.size(); ++i) {
    journal::JournalEntry e;
    e.key = std::to_string(i + 1);
    e.event = events_feelings[i].first;
    e.feelings = events_feelings[i].second;
    if (stream != journal::StreamTag::GroundTruth) e.reasoning = "because";
    j.entries.push_back(std::move(e));
  }
  return j;
}

namespace {

const std::vector<std::string> kEventWords = {
    "family", "call",   "video",  "chat",   "email",   "work",  "lunch",  "music", "news",
    "game",   "social", "feed",   "photos", "maps",    "bus",   "coffee", "study", "notes",
    "shop",   "online", "movie",  "stream", "message", "friend"};
const std::vector<std::string> kFeelingWords = {"happy",   "tired", "calm",    "bored",  "relaxed",
                                                "focused", "warm",  "anxious", "curious", "connected"};

std::string phrase(std::mt19937_64& rng, const std::vector<std::string>& words, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string s;
  const int n = len(rng);
  for (int k = 0; k < n; ++k) {
    if (k) s += (rng() % 3 == 0) ? ", " : " ";
    s += words[pick(rng)];
  }
  return s;
}

}  // namespace

journal::Journal random_journal(std::mt19937_64& rng, std::size_t n, journal::StreamTag stream) {
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.emplace_back(phrase(rng, kEventWords, 4), phrase(rng, kFeelingWords, 3));
  }
  return make_journal(items, stream);
}

journal::Journal random_distinct_journal(std::mt19937_64& rng, std::size_t n, journal::StreamTag stream) {
  std::vector<std::pair<std::string, std::string>> items;
  while (items.size() < n) {
    auto event = phrase(rng, kEventWords, 4);
    const bool clash = std::any_of(items.begin(), items.end(), [&](const auto& it) {
      return oracle::cosine(it.first, event) > 1.0 - 1e-9;
    });
    if (!clash) items.emplace_back(std::move(event), phrase(rng, kFeelingWords, 3));
  }
  return make_journal(items, stream);
}

namespace {

std::string journal_json(const std::vector<std::array<std::string, 3>>& entries, bool with_reasoning) {
  std::string s = "{\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    s += "  \"" + std::to_string(i + 1) + "\": {\"event\": \"" + entries[i][0] + "\", \"feelings\": \"" +
         entries[i][1] + "\"";
    if (with_reasoning) s += ", \"reasoning\": \"" + entries[i][2] + "\"";
    s += i + 1 < entries.size() ? "},\n" : "}\n";
  }
  return s + "}\n";
}

}  // namespace

E2eFixture build_e2e_fixture(const fs::path& root, int frames_per_day, bool lossless) {
  E2eFixture fx;
  fx.root = root;
  fx.participants = {"alice", "bob", "carol"};
  fx.dates = {"2024-05-01", "2024-05-02", "2024-05-03", "2024-05-04", "2024-05-05"};
  const auto mock = root / "fixtures" / "mock_responses";

  const std::vector<std::string> activities = {"Family call",       "Checking email",    "Watching a video",
                                               "Reading news",      "Playing a game",    "Messaging a friend",
                                               "Browsing social media", "Listening to music"};
  const std::vector<std::string> moods = {"Belonging, tired, warm", "Focused, calm", "Relaxed, amused",
                                          "Curious",                "Excited",       "Connected, happy",
                                          "Bored",                  "Calm, content"};

  write_text(mock / "chunk_describe.txt", "The user scrolled through several apps.\n");
  std::uint32_t seed = 1;
  for (std::size_t p = 0; p < fx.participants.size(); ++p) {
    const auto& who = fx.participants[p];
    for (std::size_t d = 0; d < fx.dates.size(); ++d) {
      const auto& date = fx.dates[d];
      const auto day = *parse_date(date);
      const auto [begin, end] = day_window_ms(day, 0);
      (void)end;
      const auto dir = root / "screenshots" / who / date;
      ingest::EpochMs t = begin + 9 * 3600 * 1000;
      RgbImage prev;
      for (int k = 0; k < frames_per_day; ++k) {
        // every fourth frame repeats its predecessor so dedup has work to do
        RgbImage img = (k % 4 == 3) ? prev : pattern_image(48, 32, seed++);
        write_frame(dir, t, img);
        prev = std::move(img);
        t += 3000;
      }

      const std::size_t base = (p * 3 + d) % activities.size();
      std::vector<std::array<std::string, 3>> gt, text, video;
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t a = (base + k) % activities.size();
        gt.push_back({activities[a], moods[a], ""});
      }
      text.push_back({activities[base], moods[base], "App screen shows it."});
      text.push_back({activities[(base + 1) % activities.size()], moods[(base + 4) % moods.size()], "Seen in chat."});
      video.push_back({activities[(base + 2) % activities.size()], moods[(base + 2) % moods.size()], "On screen."});
      video.push_back({activities[(base + 5) % activities.size()], moods[(base + 1) % moods.size()], "Timeline."});
      video.push_back({activities[base], moods[(base + 3) % moods.size()], "Clock visible."});

      write_text(root / "ground_truth" / who / (date + ".json"), journal_json(gt, false));
      write_text(mock / who / date / "text_journal.txt",
                 "Here is the journal:\n```json\n" + journal_json(text, true) + "```\n");
      write_text(mock / who / date / "video_journal.txt", journal_json(video, true));
    }
  }

  std::string cfg;
  cfg += "participants: [alice, bob, carol]\n";
  cfg += "dates: [2024-05-01, 2024-05-02, 2024-05-03, 2024-05-04, 2024-05-05]\n";
  cfg += "streams: [text, video]\n";
  cfg += "utc_offset_minutes: 0\n";
  cfg += "jobs: 2\n";
  cfg += "paths:\n  screenshots: screenshots\n  ground_truth: ground_truth\n  out_dir: out\n";
  cfg += "ingest:\n  dedup_threshold: 1.0\n  interval_s: 3\n";
  cfg += "chunk:\n  max_images: 4\n";
  cfg += "video:\n  fps: 30\n  lossless: " + std::string(lossless ? "true" : "false") + "\n";
  cfg += "  encoder_path: " + encoder_program() + "\n";
  cfg += "model:\n  provider: mock\n  mock_dir: fixtures/mock_responses\n  rpm: 0\n  retry_base_delay_ms: 1\n";
  cfg += "eval:\n  provider: stub\n  stub_dim: 256\n";
  fx.config = root / "config.yaml";
  write_text(fx.config, cfg);
  return fx;
}

std::string encoder_program() { return AJ_TEST_ENCODER; }
std::string cli_program() { return AJ_TEST_CLI; }

}  // namespace ajtest
