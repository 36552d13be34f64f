// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bhdimer/core/ensemble.hpp"
#include "bhdimer/core/params.hpp"
#include "bhdimer/core/random.hpp"

namespace bhd::twa {

/// Bare (unrescaled) site amplitudes.
struct PhasePoint {
  cplx alpha1;
  cplx alpha2;

  bool finite(double bound) const {
    return std::isfinite(alpha1.real()) && std::isfinite(alpha1.imag()) && std::isfinite(alpha2.real()) &&
           std::isfinite(alpha2.imag()) && std::abs(alpha1) <= bound && std::abs(alpha2) <= bound;
  }
};

/// independent: one complex noise per mode. collective: a single noise shared
/// by both modes, the diffusion generated by the dissipator D[a1 + a2].
enum class NoiseModel { Independent, Collective };

std::string to_string(NoiseModel m);
NoiseModel noise_model_from_string(const std::string& s);

/// d alpha1/dt = [i Delta - gamma/2 - 2 i U (|alpha1|^2 - 1)] alpha1 + (i J - gamma/2) alpha2 - i F,
/// mirrored for alpha2 with +i F; kappa adds -kappa/2 alpha_i.
PhasePoint twa_drift(const PhasePoint& pt, const DimerParams& p);

/// alpha_i = alpha_i0 + (xi_x + i xi_y) / 2 with standard normal xi.
PhasePoint sample_wigner_coherent(cplx alpha1, cplx alpha2, std::mt19937_64& rng, NormalSource& normal);

struct TwaOptions {
  double dt = 1e-3;
  double sample_interval = 0.1;
  NoiseModel noise = NoiseModel::Independent;
  double divergence_threshold = 1e6;
  unsigned threads = 1;
};

/// Columns: a1, a2, aA, aB (means of the amplitudes) and n1, n2, nA, nB
/// (mean |alpha|^2 - 1/2).
struct TwaSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  EnsembleStats stats;
  std::int64_t n_diverged = 0;
};

/// Stochastic Heun integration with additive noise; the same increment enters
/// predictor and corrector. Diverged trajectories are dropped from the
/// averages and counted.
TwaSeries twa_ensemble(cplx alpha1_0, cplx alpha2_0, const DimerParams& p, double t_final, std::int64_t n_traj,
                       std::uint64_t seed, const TwaOptions& opt = {});

}  // namespace bhd::twa
