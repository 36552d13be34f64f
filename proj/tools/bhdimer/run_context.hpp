// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhdimer/core/params.hpp"
#include "bhdimer/twa/twa.hpp"

namespace bhd::cli {

using nlohmann::json;

struct GlobalOptions {
  DimerParams params;
  std::string twa_noise = "independent";
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "out";
  std::string run_name;
};

/// Output directory, list of written artifacts and the manifest.
class RunContext {
 public:
  RunContext(std::string subcommand, const GlobalOptions& g);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const GlobalOptions& globals() const noexcept { return globals_; }
  unsigned threads() const noexcept { return threads_; }

  /// Path inside the run directory; recorded in the manifest.
  std::filesystem::path output(const std::string& name);

  json& settings() noexcept { return settings_; }
  json& results() noexcept { return results_; }

  void write_json(const std::string& name, const json& j);
  void finish();

 private:
  std::string subcommand_;
  GlobalOptions globals_;
  unsigned threads_;
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  json settings_ = json::object();
  json results_ = json::object();
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
};

json params_to_json(const DimerParams& p);
std::string utc_timestamp(bool compact);

}  // namespace bhd::cli
