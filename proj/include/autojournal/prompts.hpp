#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace autojournal::gateway {

enum class PromptId { ChunkDescribe, TextJournal, VideoJournal };

std::string_view to_string(PromptId id);
// File name under prompts/, e.g. "chunk_describe.txt".
std::string template_file_name(PromptId id);

struct PromptTemplate {
  PromptId id;
  std::string body;

  // Placeholder names ({NAME} with NAME an identifier), in first-use order.
  std::vector<std::string> placeholders() const;
};

// Templates compiled into the binary from prompts/*.txt.
const PromptTemplate& builtin_template(PromptId id);
PromptTemplate load_template(PromptId id, const std::filesystem::path& prompts_dir);

using Bindings = std::map<std::string, std::string>;

// Substitutes every {NAME} verbatim. Braces that do not enclose an
// identifier (the JSON examples in the journal prompts) are left alone.
// Throws Error(UnboundPlaceholder) naming the first unbound placeholder.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

}  // namespace autojournal::gateway
