// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bhdimer/core/params.hpp"

namespace bhd::semiclassical {

struct SweepOptions {
  int n_ic = 100;
  double t_transient = 100.0;
  double t_sample = 50.0;
  double sample_interval = 1e-2;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double ic_max_amplitude = 2.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
};

/// Site amplitudes with |alpha_i| uniform in [0, max] and uniform phases.
ModeState random_initial_condition(std::mt19937_64& rng, double max_amplitude);

/// Initial condition `index` of a run; shared across all drive values.
ModeState initial_condition(std::uint64_t seed, int index, double max_amplitude);

struct SweepSample {
  double f_tilde;
  int ic_index;
  double t;
  double abs_alpha_b;
  double abs_alpha_a;
};

struct IcFailure {
  double f_tilde;
  int ic_index;
  double time;
  std::string message;
};

struct SweepResult {
  std::vector<SweepSample> samples;
  std::vector<IcFailure> failures;
};

SweepResult order_parameter_sweep(const DimerParams& p, const std::vector<double>& f_grid,
                                  const SweepOptions& opt = {});

struct PortraitPoint {
  int ic_index;
  double t;
  ModeState state;
};

struct PhasePortrait {
  std::vector<PortraitPoint> points;
  std::vector<IcFailure> failures;
};

PhasePortrait phase_portrait(const DimerParams& p, const SweepOptions& opt = {});

}  // namespace bhd::semiclassical
