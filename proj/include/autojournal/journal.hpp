#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autojournal::journal {

enum class StreamTag { Text, Video, GroundTruth };

std::string_view to_string(StreamTag tag);
std::optional<StreamTag> parse_stream_tag(std::string_view text);

inline constexpr std::size_t kMaxGeneratedEntries = 30;

struct JournalEntry {
  std::string key;  // "1".."N"
  std::string event;
  std::string feelings;
  std::optional<std::string> reasoning;  // never set on ground truth

  bool operator==(const JournalEntry&) const = default;
};

struct Journal {
  std::vector<JournalEntry> entries;
  std::string participant;
  std::string date;
  StreamTag stream = StreamTag::Text;

  std::size_t size() const { return entries.size(); }
  bool operator==(const Journal&) const = default;
};

// Locates the outermost JSON object in model output, looking inside the
// first fenced code block when there is one. Throws Error(NoJsonFound).
std::string extract_json_object(std::string_view raw);

// Tolerant reading of model output: strips prose and code fences, orders
// entries by their numeric keys, collapses consecutive entries with
// byte-identical event text and renumbers to "1".."N".
// Throws NoJsonFound, SchemaViolation, or TooManyEntries (generated > 30).
Journal parse_journal(std::string_view raw, StreamTag stream);

// ground_truth/<participant>/<date>.json; "reasoning" is rejected.
Journal load_ground_truth(const std::filesystem::path& path);

// Reads a journal written by write_journal (or any clean journal) and tags it.
Journal load_journal(const std::filesystem::path& path, StreamTag stream);

// Throws SchemaViolation / TooManyEntries if `j` breaks an invariant.
void validate(const Journal& j);

// Canonical UTF-8 JSON: keys in ordinal order, two-space indent, trailing
// newline. serialize(parse(serialize(j))) == serialize(j).
std::string serialize_journal(const Journal& j);
void write_journal(const Journal& j, const std::filesystem::path& path);

}  // namespace autojournal::journal
