// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bhdimer/core/dopri5.hpp"
#include "bhdimer/core/params.hpp"

namespace bhd::semiclassical {

struct Trajectory {
  std::vector<double> times;
  std::vector<ModeState> states;
  double sample_interval = 0.0;
};

struct IntegrateOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double sample_interval = 1e-2;
  double sample_from = 0.0;  // first sample time; earlier output is discarded
};

/// Time derivative of the rescaled mean-field amplitudes.
ModeState mean_field_rhs(const ModeState& s, const DimerParams& p);

/// Adaptive integration sampled on t = sample_from + k * sample_interval.
/// Throws ode::StepUnderflow with the failing time.
Trajectory integrate(const ModeState& s0, const DimerParams& p, double t_final,
                     const IntegrateOptions& opt = {});

/// State at t_final only.
ModeState evolve(const ModeState& s0, const DimerParams& p, double t_final,
                 double rel_tol = 1e-9, double abs_tol = 1e-11);

enum class Stability { Attractive, StableNonAttractive, Repulsive };

std::string to_string(Stability s);

/// Real parts within this bound (in units of gamma) count as zero.
inline constexpr double kZeroRealPart = 1e-7;

Stability classify(const std::array<cplx, 4>& eigenvalues, double gamma);

struct FixedPoint {
  ModeState state;
  std::array<cplx, 4> jacobian_eigenvalues{};
  Stability stability = Stability::Repulsive;
  bool symmetry_breaking = false;
};

/// Real root of u x^3 + (J - Delta) x + sqrt(2) F = 0 from the radical form,
/// Newton-polished. Requires J - Delta > 0.
double symmetric_fixed_point_amplitude(const DimerParams& p);

FixedPoint fixed_point_symmetric(const DimerParams& p);

/// Closed-form eigenvalues (lambda_B+, lambda_B-, lambda_A+, lambda_A-) at the
/// symmetric fixed point, including the -kappa/2 shift.
std::array<cplx, 4> symmetric_fp_eigenvalues(const DimerParams& p);

/// Jacobian of the flow for (alpha_B, alpha_B*, alpha_A, alpha_A*).
Eigen::Matrix4cd general_jacobian(const ModeState& s, const DimerParams& p);

std::array<cplx, 4> jacobian_eigenvalues(const ModeState& s, const DimerParams& p);

struct RootSearchOptions {
  int n_starts = 400;
  std::uint64_t seed = 12345;
  double symmetry_tolerance = 1e-6;
  double dedup_distance = 1e-8;
  double residual_tolerance = 1e-10;
  double box = 2.5;  // starting amplitudes drawn with |alpha| <= box
};

/// Fixed points with |alpha_B| above the tolerance, returned as mirror pairs.
std::vector<FixedPoint> find_symmetry_breaking_fixed_points(const DimerParams& p,
                                                            const RootSearchOptions& opt = {});

/// Newton refinement of a stationary point from a starting guess.
std::optional<ModeState> refine_fixed_point(const ModeState& guess, const DimerParams& p,
                                            double residual_tolerance = 1e-10, int max_iter = 100);

/// F-tilde interval where Re lambda_B+ > 0, bracketed on [0, f_max] and
/// bisected to 1e-4 gamma. Requires J - Delta > 0.
std::optional<std::pair<double, double>> instability_window(const DimerParams& p, double f_max = 5.0);

/// F-tilde values in (f_lo, f_hi) where the symmetry-breaking pair changes
/// between attractive and non-attractive.
std::vector<double> symmetry_breaking_stability_boundaries(const DimerParams& p, double f_lo,
                                                           double f_hi, double step = 0.01,
                                                           const RootSearchOptions& opt = {});

/// Decoupled antibonding oscillator obtained by setting alpha_B = 0.
cplx reduced_antibonding_rhs(cplx alpha_a, const DimerParams& p);

/// Conserved energy of the decoupled antibonding oscillator.
double reduced_antibonding_energy(cplx alpha_a, const DimerParams& p);

/// Bonding mode linearised around alpha_B = 0 for a given antibonding amplitude.
cplx reduced_bonding_rhs(cplx alpha_b, cplx alpha_a, const DimerParams& p);

enum class Observable { AbsA, AbsB, ReA };

double observe(const ModeState& s, Observable o);

/// Mean spacing of maxima over the final third of the trajectory. Empty when
/// the oscillation amplitude is below 1e-6 or the spacing spread exceeds 1%.
std::optional<double> limit_cycle_period(const Trajectory& traj, Observable o);

std::optional<double> limit_cycle_period(const std::vector<double>& times,
                                         const std::vector<double>& values);

}  // namespace bhd::semiclassical
