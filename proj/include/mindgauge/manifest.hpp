// Run manifests: every pipeline command writes one alongside its outputs,
// recording the command, its configuration, the seed, and content hashes of
// the inputs. Data artifacts themselves stay byte-reproducible; the
// timestamp lives only here.
#pragma once

#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include "mindgauge/common.hpp"

#include <nlohmann/json.hpp>

namespace mindgauge {

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, fnv1a64
  std::vector<std::string> outputs;                          // paths
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string timestamp;  // UTC, RFC 3339

  void add_input(const std::string& path) {
    inputs.emplace_back(path, hex64(fnv1a64(read_file(path))));
  }
  void add_output(const std::string& path) { outputs.push_back(path); }
};

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : m.inputs) {
    inputs.push_back(nlohmann::ordered_json{{"path", path}, {"fnv1a64", hash}});
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = m.outputs;
  j["config"] = m.config;
  j["timestamp"] = m.timestamp.empty() ? utc_timestamp() : m.timestamp;
  return j;
}

inline void save_manifest(const std::string& path, const RunManifest& m) {
  write_file_atomic(path, manifest_to_json(m).dump(2) + "\n");
}

}  // namespace mindgauge
