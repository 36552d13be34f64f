// SPDX-License-Identifier: Apache-2.0
#include "run_context.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

#include "bhdimer/core/parallel.hpp"

#ifndef BHDIMER_VERSION
#define BHDIMER_VERSION "unknown"
#endif

namespace bhd::cli {

std::string utc_timestamp(bool compact) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json params_to_json(const DimerParams& p) {
  return {{"delta", p.delta}, {"j_coupling", p.j_coupling}, {"u_tilde", p.u_tilde}, {"f_tilde", p.f_tilde},
          {"gamma", p.gamma}, {"kappa", p.kappa},           {"n_scale", p.n_scale}};
}

RunContext::RunContext(std::string subcommand, const GlobalOptions& g)
    : subcommand_(std::move(subcommand)),
      globals_(g),
      threads_(resolve_threads(g.threads)),
      started_(utc_timestamp(false)),
      t0_(std::chrono::steady_clock::now()) {
  namespace fs = std::filesystem;
  const fs::path root(g.out);
  fs::create_directories(root);
  if (!g.run_name.empty()) {
    dir_ = root / g.run_name;
    if (fs::exists(dir_ / "manifest.json"))
      throw std::runtime_error("run directory already holds a manifest: " + dir_.string());
    fs::create_directories(dir_);
    return;
  }
  const std::string base = subcommand_ + "-" + utc_timestamp(true);
  for (int i = 0;; ++i) {
    dir_ = root / (i == 0 ? base : base + "-" + std::to_string(i));
    // create_directory fails when another process took the name first
    if (fs::create_directory(dir_)) break;
  }
}

std::filesystem::path RunContext::output(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void RunContext::write_json(const std::string& name, const json& j) {
  std::ofstream f(output(name));
  if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
  f << j.dump(2) << '\n';
}

void RunContext::finish() {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  json m;
  m["subcommand"] = subcommand_;
  m["version"] = BHDIMER_VERSION;
  m["parameters"] = params_to_json(globals_.params);
  m["twa_noise"] = globals_.twa_noise;
  m["seed"] = globals_.seed;
  m["threads"] = threads_;
  m["settings"] = settings_;
  m["outputs"] = outputs_;
  m["results"] = results_;
  m["started_utc"] = started_;
  m["wall_seconds"] = seconds;
  std::ofstream f(dir_ / "manifest.json");
  f << m.dump(2) << '\n';
}

}  // namespace bhd::cli
