#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

namespace csicl {

/// Append-only, content-addressed directory of JSON documents
/// (<root>/<digest>.json). Writes are atomic renames serialized by a mutex;
/// reads are lock-free. Existing entries are never overwritten.
class JsonStore {
 public:
  explicit JsonStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path path_for(const std::string& digest) const;

  std::optional<nlohmann::json> get(const std::string& digest) const;
  /// Returns false when the entry already existed (first writer wins).
  bool put(const std::string& digest, const nlohmann::json& doc);

 private:
  std::filesystem::path root_;
  std::mutex write_mu_;
};

/// Canonical serialization: sorted keys, 2-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& doc);

}  // namespace csicl
