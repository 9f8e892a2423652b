#include "appeco/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "appeco/digest.hpp"

namespace appeco {

void RunManifest::add_input(const std::string& path) {
  inputs[path] = "sha256:" + sha256_file_hex(path);
}

void RunManifest::write(const std::string& out_dir) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config_json.empty() ? nlohmann::json::object()
                                    : nlohmann::json::parse(config_json);
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["version"] = kToolVersion;
  const std::string path = out_dir + "/manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace appeco
