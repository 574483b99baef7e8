#include "autojournal/journal.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "autojournal/error.hpp"

namespace autojournal::journal {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(StreamTag tag) {
  switch (tag) {
    case StreamTag::Text: return "text";
    case StreamTag::Video: return "video";
    case StreamTag::GroundTruth: return "ground_truth";
  }
  return "unknown";
}

std::optional<StreamTag> parse_stream_tag(std::string_view text) {
  if (text == "text") return StreamTag::Text;
  if (text == "video") return StreamTag::Video;
  if (text == "ground_truth") return StreamTag::GroundTruth;
  return std::nullopt;
}

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

// Index one past the '}' matching the '{' at `open`, honouring JSON strings.
std::optional<std::size_t> match_object(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<std::string> first_object(std::string_view s) {
  for (std::size_t pos = s.find('{'); pos != std::string_view::npos; pos = s.find('{', pos + 1)) {
    const auto end = match_object(s, pos);
    // an unterminated brace encloses the rest, so nothing after it is outermost
    if (!end) break;
    const std::string_view candidate = s.substr(pos, *end - pos);
    const auto parsed = ojson::parse(candidate, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return std::string(candidate);
  }
  return std::nullopt;
}

std::string_view fenced_body(std::string_view raw) {
  const auto open = raw.find("```");
  if (open == std::string_view::npos) return {};
  // Skip the info string ("json") up to the end of the fence line.
  auto body_start = raw.find('\n', open + 3);
  if (body_start == std::string_view::npos) return {};
  ++body_start;
  const auto close = raw.find("```", body_start);
  return raw.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
}

std::optional<long long> parse_key(const std::string& key) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (ec != std::errc{} || ptr != key.data() + key.size() || v <= 0) return std::nullopt;
  return v;
}

std::string text_field(const ojson& entry, const char* name, const std::string& key) {
  const auto& v = entry.at(name);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw Error(ErrorCode::SchemaViolation, "entry " + key + ": \"" + name + "\" list must hold strings");
      }
      if (!joined.empty()) joined += ", ";
      joined += item.get<std::string>();
    }
    return joined;
  }
  throw Error(ErrorCode::SchemaViolation, "entry " + key + ": \"" + name + "\" must be text");
}

Journal from_object(const ojson& obj, StreamTag stream, bool collapse_repeats) {
  if (!obj.is_object()) throw Error(ErrorCode::SchemaViolation, "journal must be a JSON object");
  struct Keyed {
    long long ordinal;
    JournalEntry entry;
  };
  std::vector<Keyed> keyed;
  for (const auto& [key, value] : obj.items()) {
    const auto ordinal = parse_key(key);
    if (!ordinal) throw Error(ErrorCode::SchemaViolation, "key is not a positive integer: \"" + key + "\"");
    if (!value.is_object()) throw Error(ErrorCode::SchemaViolation, "entry " + key + " is not an object");
    if (!value.contains("event")) throw Error(ErrorCode::SchemaViolation, "entry " + key + " lacks \"event\"");
    if (!value.contains("feelings")) {
      throw Error(ErrorCode::SchemaViolation, "entry " + key + " lacks \"feelings\"");
    }
    JournalEntry e;
    e.event = text_field(value, "event", key);
    e.feelings = text_field(value, "feelings", key);
    if (stream == StreamTag::GroundTruth) {
      if (value.contains("reasoning")) {
        throw Error(ErrorCode::SchemaViolation, "ground-truth entry " + key + " carries \"reasoning\"");
      }
    } else {
      if (!value.contains("reasoning")) {
        throw Error(ErrorCode::SchemaViolation, "entry " + key + " lacks \"reasoning\"");
      }
      e.reasoning = text_field(value, "reasoning", key);
    }
    keyed.push_back({*ordinal, std::move(e)});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const Keyed& l, const Keyed& r) { return l.ordinal < r.ordinal; });

  Journal j;
  j.stream = stream;
  for (auto& k : keyed) {
    if (collapse_repeats && !j.entries.empty() && j.entries.back().event == k.entry.event) continue;
    k.entry.key = std::to_string(j.entries.size() + 1);
    j.entries.push_back(std::move(k.entry));
  }
  validate(j);
  return j;
}

std::string read_all(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::FileUnreadable, path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw Error(ErrorCode::FileUnreadable, path.string());
  return ss.str();
}

void tag_from_path(Journal& j, const fs::path& path) {
  j.participant = path.parent_path().filename().string();
  std::string stem = path.filename().string();
  j.date = stem.substr(0, stem.find('.'));
}

}  // namespace

void validate(const Journal& j) {
  if (j.entries.empty()) throw Error(ErrorCode::SchemaViolation, "journal has no entries");
  if (j.stream != StreamTag::GroundTruth && j.entries.size() > kMaxGeneratedEntries) {
    throw Error(ErrorCode::TooManyEntries, std::to_string(j.entries.size()));
  }
  for (std::size_t i = 0; i < j.entries.size(); ++i) {
    const auto& e = j.entries[i];
    if (e.key != std::to_string(i + 1)) {
      throw Error(ErrorCode::SchemaViolation, "keys must run 1..N, found \"" + e.key + "\"");
    }
    if (is_blank(e.event)) throw Error(ErrorCode::SchemaViolation, "entry " + e.key + " has an empty event");
    if (is_blank(e.feelings)) throw Error(ErrorCode::SchemaViolation, "entry " + e.key + " has empty feelings");
    if (j.stream == StreamTag::GroundTruth && e.reasoning) {
      throw Error(ErrorCode::SchemaViolation, "ground-truth entry " + e.key + " carries reasoning");
    }
  }
}

std::string extract_json_object(std::string_view raw) {
  if (const auto body = fenced_body(raw); !body.empty()) {
    if (auto obj = first_object(body)) return *obj;
  }
  if (auto obj = first_object(raw)) return *obj;
  throw Error(ErrorCode::NoJsonFound, "no JSON object in model output");
}

Journal parse_journal(std::string_view raw, StreamTag stream) {
  if (is_blank(raw)) throw Error(ErrorCode::NoJsonFound, "empty model output");
  const auto text = extract_json_object(raw);
  return from_object(ojson::parse(text), stream, stream != StreamTag::GroundTruth);
}

Journal load_ground_truth(const fs::path& path) {
  const std::string text = read_all(path);
  const auto obj = ojson::parse(text, nullptr, false);
  if (obj.is_discarded()) throw Error(ErrorCode::SchemaViolation, path.string() + ": not valid JSON");
  Journal j = from_object(obj, StreamTag::GroundTruth, false);
  tag_from_path(j, path);
  return j;
}

Journal load_journal(const fs::path& path, StreamTag stream) {
  if (stream == StreamTag::GroundTruth) return load_ground_truth(path);
  const std::string text = read_all(path);
  const auto obj = ojson::parse(text, nullptr, false);
  if (obj.is_discarded()) throw Error(ErrorCode::SchemaViolation, path.string() + ": not valid JSON");
  Journal j = from_object(obj, stream, false);
  tag_from_path(j, path);
  return j;
}

std::string serialize_journal(const Journal& j) {
  validate(j);
  ojson root = ojson::object();
  for (const auto& e : j.entries) {
    ojson entry = ojson::object();
    entry["event"] = e.event;
    entry["feelings"] = e.feelings;
    if (e.reasoning) entry["reasoning"] = *e.reasoning;
    root[e.key] = std::move(entry);
  }
  try {
    return root.dump(2, ' ', false, ojson::error_handler_t::strict) + "\n";
  } catch (const ojson::exception& ex) {
    throw Error(ErrorCode::SchemaViolation, std::string("journal text is not valid UTF-8: ") + ex.what());
  }
}

void write_journal(const Journal& j, const fs::path& path) {
  const std::string text = serialize_journal(j);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::WriteFailed, path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw Error(ErrorCode::WriteFailed, path.string());
}

}  // namespace autojournal::journal
