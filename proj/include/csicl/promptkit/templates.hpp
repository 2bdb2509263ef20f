#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace csicl {

/// Substitutes `{name}` placeholders (lowercase letters and underscores).
/// Throws std::invalid_argument for a placeholder missing from `vars`.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Prompt templates loaded from a directory tree of `.txt` files. A template
/// is addressed by its relative path without extension, e.g.
/// "system/csicl.mcq". The single trailing newline of each file is dropped.
class PromptLibrary {
 public:
  explicit PromptLibrary(std::filesystem::path dir = default_dir());

  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const noexcept { return dir_; }
  bool contains(std::string_view name) const;
  const std::string& raw(std::string_view name) const;
  std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const;
  /// SHA-256 of the file bytes as stored on disk.
  std::string checksum(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string, std::less<>> templates_;
  std::map<std::string, std::string, std::less<>> checksums_;
};

}  // namespace csicl
