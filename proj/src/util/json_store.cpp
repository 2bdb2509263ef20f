#include "csicl/util/json_store.hpp"

#include "csicl/util/text.hpp"

namespace csicl {

JsonStore::JsonStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path JsonStore::path_for(const std::string& digest) const { return root_ / (digest + ".json"); }

std::optional<nlohmann::json> JsonStore::get(const std::string& digest) const {
  const auto p = path_for(digest);
  std::error_code ec;
  if (!std::filesystem::exists(p, ec)) return std::nullopt;
  return nlohmann::json::parse(read_file(p));
}

bool JsonStore::put(const std::string& digest, const nlohmann::json& doc) {
  const auto p = path_for(digest);
  std::lock_guard lock(write_mu_);
  if (std::filesystem::exists(p)) return false;
  write_file_atomic(p, canonical_dump(doc));
  return true;
}

std::string canonical_dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace csicl
