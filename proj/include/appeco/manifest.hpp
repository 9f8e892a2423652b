#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace appeco {

inline constexpr const char* kToolVersion = "appeco 0.1.0";

// Every CLI run writes manifest.json next to its outputs: the resolved
// config, the seed, and a content digest per input file. Reruns with an
// identical manifest must produce identical artifact digests.
struct RunManifest {
  std::string command;
  std::string config_json;  // resolved configuration (JSON text)
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // path -> sha256

  void add_input(const std::string& path);
  void write(const std::string& out_dir) const;
};

}  // namespace appeco
