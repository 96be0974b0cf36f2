#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mped/config.hpp"

namespace mped::cli {

inline constexpr const char* kManifestName = "manifest.json";

std::string fnv1a64_file(const std::filesystem::path& path);

/// Provenance of one CLI run. Every artifact written under --out names the
/// manifest file; the manifest lists the artifacts back.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(const MetricConfig& config);
  void set_extra(const std::string& key, nlohmann::json value);
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  /// Writes dir/manifest.json atomically and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json config_;
  nlohmann::json extra_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mped::cli
