#include "fscap/app/manifest.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <json.hpp>

namespace fscap::app {

const char* tool_version() { return FSCAP_VERSION; }

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::string hex;
  char byte[3];
  for (unsigned char c : digest) {
    std::snprintf(byte, sizeof byte, "%02x", c);
    hex += byte;
  }
  return hex;
}

std::string to_json(const RunManifest& m) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : m.tasks) tasks.push_back({{"id", t.id}, {"row", t.row}, {"wall_ms", t.wall_ms}});
  nlohmann::json j = {{"tool_version", m.tool_version},
                      {"config", nlohmann::json::parse(m.config)},
                      {"seeds", m.seeds},
                      {"tasks", tasks},
                      {"input_hash", m.input_hash}};
  return j.dump(2);
}

}  // namespace fscap::app
