#include <gtest/gtest.h>

#include <random>

#include "autojournal/error.hpp"
#include "autojournal/journal.hpp"
#include "support/fixtures.hpp"

using namespace autojournal;
using namespace autojournal::journal;

namespace {

const std::string kTwo =
    R"({"1": {"event": "Family call", "feelings": "Belonging, warm", "reasoning": "video chat app open"},
 "2": {"event": "Read news", "feelings": "Curious", "reasoning": "news site"}})";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

std::string n_entries(int n, bool distinct = true) {
  std::string s = "{";
  for (int i = 1; i <= n; ++i) {
    if (i > 1) s += ",";
    s += "\"" + std::to_string(i) + "\": {\"event\": \"e" + (distinct ? std::to_string(i) : "") +
         "\", \"feelings\": \"f\", \"reasoning\": \"r\"}";
  }
  return s + "}";
}

}  // namespace

TEST(ParseJournal, DirectObject) {
  const auto j = parse_journal(kTwo, StreamTag::Text);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j.entries[0].key, "1");
  EXPECT_EQ(j.entries[1].key, "2");
  EXPECT_EQ(j.entries[0].event, "Family call");
  EXPECT_EQ(j.entries[1].reasoning, "news site");
  EXPECT_EQ(j.stream, StreamTag::Text);
}

TEST(ParseJournal, FencedWithLeadInIsIdentical) {
  const auto plain = parse_journal(kTwo, StreamTag::Video);
  EXPECT_EQ(parse_journal("Sure! Here is the diary for the day:\n```json\n" + kTwo + "\n```\nLet me know.",
                          StreamTag::Video),
            plain);
  EXPECT_EQ(parse_journal("```\n" + kTwo + "\n```", StreamTag::Video), plain);
  EXPECT_EQ(parse_journal("The {day} was busy. " + kTwo + " That's all {", StreamTag::Video), plain);
}

TEST(ParseJournal, SkippedKeysAreRenumberedInOrder) {
  const std::string raw = R"({"1": {"event": "a", "feelings": "x", "reasoning": "r"},
  "3": {"event": "b", "feelings": "y", "reasoning": "r"},
  "4": {"event": "c", "feelings": "z", "reasoning": "r"}})";
  const auto j = parse_journal(raw, StreamTag::Text);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j.entries[0].key, "1");
  EXPECT_EQ(j.entries[1].key, "2");
  EXPECT_EQ(j.entries[2].key, "3");
  EXPECT_EQ(j.entries[1].event, "b");
  EXPECT_EQ(j.entries[2].event, "c");
}

TEST(ParseJournal, KeysOrderedNumericallyNotLexically) {
  const std::string raw = R"({"10": {"event": "ten", "feelings": "x", "reasoning": "r"},
  "2": {"event": "two", "feelings": "y", "reasoning": "r"}})";
  const auto j = parse_journal(raw, StreamTag::Text);
  EXPECT_EQ(j.entries[0].event, "two");
  EXPECT_EQ(j.entries[1].event, "ten");
}

TEST(ParseJournal, ConsecutiveRepeatsCollapse) {
  const std::string raw = R"({"1": {"event": "same", "feelings": "x", "reasoning": "r"},
  "2": {"event": "same", "feelings": "y", "reasoning": "r"},
  "3": {"event": "other", "feelings": "z", "reasoning": "r"},
  "4": {"event": "same", "feelings": "w", "reasoning": "r"}})";
  const auto j = parse_journal(raw, StreamTag::Text);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j.entries[0].feelings, "x");
  EXPECT_EQ(j.entries[2].event, "same");
}

TEST(ParseJournal, FeelingsListIsJoined) {
  const auto j = parse_journal(R"({"1": {"event": "a", "feelings": ["happy", "calm"], "reasoning": "r"}})",
                               StreamTag::Text);
  EXPECT_EQ(j.entries[0].feelings, "happy, calm");
}

TEST(ParseJournal, EntryLimit) {
  EXPECT_EQ(parse_journal(n_entries(30), StreamTag::Text).size(), 30u);
  EXPECT_EQ(code_of([] { parse_journal(n_entries(31), StreamTag::Text); }), ErrorCode::TooManyEntries);
  // repeats collapse before the limit is applied
  EXPECT_EQ(parse_journal(n_entries(40, false), StreamTag::Text).size(), 1u);
}

TEST(ParseJournal, Rejections) {
  EXPECT_EQ(code_of([] { parse_journal("no json here", StreamTag::Text); }), ErrorCode::NoJsonFound);
  EXPECT_EQ(code_of([] { parse_journal("", StreamTag::Text); }), ErrorCode::NoJsonFound);
  EXPECT_EQ(code_of([] { parse_journal("{\"1\": {\"event\": ", StreamTag::Text); }), ErrorCode::NoJsonFound);
  // complete inner entry, unterminated outer object
  EXPECT_EQ(code_of([] { parse_journal("{\"1\": {\"event\": \"a\", \"feelings\": \"b\"}, \"2\": {", StreamTag::Text); }),
            ErrorCode::NoJsonFound);
  EXPECT_EQ(code_of([] { parse_journal("{}", StreamTag::Text); }), ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"one": {"event": "a", "feelings": "b", "reasoning": "c"}})", StreamTag::Text); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"0": {"event": "a", "feelings": "b", "reasoning": "c"}})", StreamTag::Text); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"1": {"event": "", "feelings": "b", "reasoning": "c"}})", StreamTag::Text); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"1": {"event": "a", "reasoning": "c"}})", StreamTag::Text); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"1": {"event": "a", "feelings": "b"}})", StreamTag::Text); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_journal(R"({"1": "flat"})", StreamTag::Text); }), ErrorCode::SchemaViolation);
}

TEST(GroundTruth, Examples) {
  ajtest::TempDir dir("gt");
  ajtest::write_text(dir / "alice" / "2024-05-01.json",
                     R"({"1": {"event": "Family call", "feelings": "Belonging, tired, warm"}})");
  const auto j = load_ground_truth(dir / "alice" / "2024-05-01.json");
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j.stream, StreamTag::GroundTruth);
  EXPECT_EQ(j.entries[0].event, "Family call");
  EXPECT_EQ(j.entries[0].feelings, "Belonging, tired, warm");
  EXPECT_FALSE(j.entries[0].reasoning.has_value());
  EXPECT_EQ(j.participant, "alice");
  EXPECT_EQ(j.date, "2024-05-01");

  ajtest::write_text(dir / "empty.json", "{}");
  EXPECT_EQ(code_of([&] { load_ground_truth(dir / "empty.json"); }), ErrorCode::SchemaViolation);
  ajtest::write_text(dir / "reason.json", R"({"1": {"event": "a", "feelings": "b", "reasoning": "c"}})");
  EXPECT_EQ(code_of([&] { load_ground_truth(dir / "reason.json"); }), ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([&] { load_ground_truth(dir / "nope.json"); }), ErrorCode::FileUnreadable);

  ajtest::write_text(dir / "long.json", [] {
    std::string s = "{";
    for (int i = 1; i <= 45; ++i) s += (i > 1 ? "," : "") + ("\"" + std::to_string(i) + "\": {\"event\": \"e\", \"feelings\": \"f\"}");
    return s + "}";
  }());
  EXPECT_EQ(load_ground_truth(dir / "long.json").size(), 45u);
}

TEST(WriteJournal, RoundTripAndByteStability) {
  ajtest::TempDir dir("jw");
  auto j = parse_journal(kTwo, StreamTag::Text);
  j.participant = "alice";
  j.date = "2024-05-01";
  const auto path = dir / "alice" / "2024-05-01.text.json";
  write_journal(j, path);
  const auto first = ajtest::read_text(path);
  const auto back = load_journal(path, StreamTag::Text);
  EXPECT_EQ(back, j);
  write_journal(back, path);
  EXPECT_EQ(ajtest::read_text(path), first);
  EXPECT_EQ(first.back(), '\n');
  EXPECT_EQ(first.find("\"1\""), first.find('"'));
}

TEST(WriteJournal, NonAsciiRoundTrips) {
  ajtest::TempDir dir("jutf8");
  auto j = ajtest::make_journal({{"Café visit 咖啡", "Happy 😊, relaxed"}, {"Музыка", "calm 🎵"}});
  j.participant = "p";
  j.date = "2024-05-02";
  write_journal(j, dir / "p" / "2024-05-02.text.json");
  const auto text = ajtest::read_text(dir / "p" / "2024-05-02.text.json");
  EXPECT_NE(text.find("😊"), std::string::npos);
  EXPECT_EQ(load_journal(dir / "p" / "2024-05-02.text.json", StreamTag::Text), j);
}

TEST(WriteJournal, PropertyRoundTrip) {
  std::mt19937_64 rng(42);
  ajtest::TempDir dir("jprop");
  for (int trial = 0; trial < 100; ++trial) {
    auto j = ajtest::random_journal(rng, 1 + rng() % 30, trial % 2 ? StreamTag::Video : StreamTag::Text);
    // quotes, backslashes and control characters must survive too
    j.entries[0].event += " \"quoted\" \\ tab\t";
    j.participant = "p";
    j.date = "2024-06-0" + std::to_string(1 + trial % 9);
    const auto text = serialize_journal(j);
    const auto reparsed = parse_journal(text, j.stream);
    // parse collapses consecutive repeats, so compare against the collapsed form
    Journal collapsed = j;
    collapsed.entries.clear();
    for (const auto& e : j.entries) {
      if (collapsed.entries.empty() || collapsed.entries.back().event != e.event) collapsed.entries.push_back(e);
    }
    for (std::size_t i = 0; i < collapsed.entries.size(); ++i) collapsed.entries[i].key = std::to_string(i + 1);
    ASSERT_EQ(reparsed.entries, collapsed.entries);
    EXPECT_EQ(serialize_journal(reparsed), serialize_journal(collapsed));
  }
}

TEST(StreamTag, Names) {
  EXPECT_EQ(to_string(StreamTag::Text), "text");
  EXPECT_EQ(to_string(StreamTag::Video), "video");
  EXPECT_EQ(parse_stream_tag("video"), StreamTag::Video);
  EXPECT_FALSE(parse_stream_tag("audio").has_value());
}
