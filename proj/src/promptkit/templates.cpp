#include "csicl/promptkit/templates.hpp"

#include <cstdlib>
#include <stdexcept>

#include "csicl/util/digest.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && ((tmpl[j] >= 'a' && tmpl[j] <= 'z') || tmpl[j] == '_')) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        const std::string name(tmpl.substr(i + 1, j - i - 1));
        const auto it = vars.find(name);
        if (it == vars.end()) throw std::invalid_argument("template placeholder {" + name + "} has no value");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::filesystem::path PromptLibrary::default_dir() {
  if (const char* env = std::getenv("CSICL_PROMPTS_DIR"); env && *env) return env;
  return CSICL_DEFAULT_PROMPTS_DIR;
}

PromptLibrary::PromptLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw std::runtime_error("prompt directory not found: " + dir_.string());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    auto rel = std::filesystem::relative(entry.path(), dir_);
    rel.replace_extension();
    std::string bytes = read_file(entry.path());
    checksums_[rel.generic_string()] = sha256_hex(bytes);
    if (!bytes.empty() && bytes.back() == '\n') bytes.pop_back();
    templates_[rel.generic_string()] = std::move(bytes);
  }
}

bool PromptLibrary::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

const std::string& PromptLibrary::raw(std::string_view name) const {
  const auto it = templates_.find(name);
  if (it == templates_.end())
    throw std::invalid_argument("no prompt template '" + std::string(name) + "' in " + dir_.string());
  return it->second;
}

std::string PromptLibrary::render(std::string_view name, const std::map<std::string, std::string>& vars) const {
  return render_template(raw(name), vars);
}

std::string PromptLibrary::checksum(std::string_view name) const {
  const auto it = checksums_.find(name);
  if (it == checksums_.end()) throw std::invalid_argument("no prompt template '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> PromptLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : templates_) out.push_back(k);
  return out;
}

}  // namespace csicl
