#include "run_manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "mped/cloud_io.hpp"
#include "mped/error.hpp"
#include "mped/report_json.hpp"

#ifndef MPED_VERSION
#define MPED_VERSION "0.0.0"
#endif

namespace mped::cli {

std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::set_config(const MetricConfig& config) { config_ = mped::to_json(config); }

void RunManifest::set_extra(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.push_back({{"path", path.string()}, {"fnv1a64", fnv1a64_file(path)}});
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path.filename().string()); }

nlohmann::json RunManifest::to_json() const {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json doc{{"tool", "mped"},
                     {"version", MPED_VERSION},
                     {"command", command_},
                     {"argv", argv_},
                     {"config", config_},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"wall_time_s", wall}};
  if (!extra_.empty()) doc["parameters"] = extra_;
  return doc;
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto path = dir / kManifestName;
  write_file_atomic(path, to_json().dump(2) + "\n");
  return path;
}

}  // namespace mped::cli
