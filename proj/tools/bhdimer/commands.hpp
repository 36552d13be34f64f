// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include <CLI11.hpp>

#include "run_context.hpp"

namespace bhd::cli {

struct Command {
  CLI::App* app;
  std::function<void(RunContext&)> run;
};

void add_sweep(CLI::App& app, std::vector<Command>& out);
void add_portrait(CLI::App& app, std::vector<Command>& out);
void add_fixed_points(CLI::App& app, std::vector<Command>& out);
void add_evolve(CLI::App& app, std::vector<Command>& out);
void add_spectrum(CLI::App& app, std::vector<Command>& out);
void add_g2(CLI::App& app, std::vector<Command>& out);
void add_fft(CLI::App& app, std::vector<Command>& out);

}  // namespace bhd::cli
