#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fscap::app {

struct TaskRecord {
  std::string id;  ///< e.g. "p=0.5/dec-fb"
  std::size_t row = 0;
  double wall_ms = 0.0;
};

struct RunManifest {
  std::string tool_version;
  std::string config;  ///< resolved configuration, JSON text
  std::vector<std::uint64_t> seeds;
  std::vector<TaskRecord> tasks;
  std::string input_hash;  ///< git_blob_hash(config)
};

/// SHA-1 over "blob <size>\0<content>", hex encoded (the id git gives a file).
std::string git_blob_hash(const std::string& content);

std::string to_json(const RunManifest& manifest);

/// Library version string.
const char* tool_version();

}  // namespace fscap::app
