#include "autojournal/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "autojournal/error.hpp"
#include "prompt_data.hpp"

namespace autojournal::gateway {

namespace {

const std::regex& placeholder_regex() {
  static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  return re;
}

}  // namespace

std::string_view to_string(PromptId id) {
  switch (id) {
    case PromptId::ChunkDescribe: return "chunk_describe";
    case PromptId::TextJournal: return "text_journal";
    case PromptId::VideoJournal: return "video_journal";
  }
  return "unknown";
}

std::string template_file_name(PromptId id) { return std::string(to_string(id)) + ".txt"; }

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), placeholder_regex());
       it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  return names;
}

const PromptTemplate& builtin_template(PromptId id) {
  static const PromptTemplate chunk{PromptId::ChunkDescribe, std::string(prompt_data::chunk_describe)};
  static const PromptTemplate text{PromptId::TextJournal, std::string(prompt_data::text_journal)};
  static const PromptTemplate video{PromptId::VideoJournal, std::string(prompt_data::video_journal)};
  switch (id) {
    case PromptId::ChunkDescribe: return chunk;
    case PromptId::TextJournal: return text;
    case PromptId::VideoJournal: return video;
  }
  return chunk;
}

PromptTemplate load_template(PromptId id, const std::filesystem::path& prompts_dir) {
  const auto path = prompts_dir / template_file_name(id);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::FileUnreadable, path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return PromptTemplate{id, ss.str()};
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::string out;
  out.reserve(tmpl.body.size());
  auto last = tmpl.body.cbegin();
  for (auto it = std::sregex_iterator(tmpl.body.begin(), tmpl.body.end(), placeholder_regex());
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto found = bindings.find(m[1].str());
    if (found == bindings.end()) throw Error(ErrorCode::UnboundPlaceholder, m[1].str());
    out.append(last, m[0].first);
    out += found->second;
    last = m[0].second;
  }
  out.append(last, tmpl.body.cend());
  return out;
}

}  // namespace autojournal::gateway
