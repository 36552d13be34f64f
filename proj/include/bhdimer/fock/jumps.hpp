// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bhdimer/core/ensemble.hpp"
#include "bhdimer/fock/master.hpp"

namespace bhd::fock {

struct JumpOptions {
  double sample_interval = 0.1;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  unsigned threads = 1;
};

struct JumpRecord {
  double time;
  int channel;
};

/// Ensemble averages of the requested observables. Two bookkeeping columns
/// are appended: "jump_rate" (instantaneous total rate sum_k r_k <L_k^dag L_k>)
/// and "jump_count" (jumps so far on the trajectory).
struct JumpEnsembleResult {
  std::vector<double> times;
  std::vector<std::string> names;
  EnsembleStats stats;
  std::int64_t total_jumps = 0;
};

/// Photon-counting unravelling: each trajectory follows the non-Hermitian
/// effective Hamiltonian until its squared norm reaches a uniform threshold;
/// the crossing time is bisected on the continuous extension and a channel is
/// chosen in proportion to its rate.
JumpEnsembleResult quantum_jump_ensemble(const StateVector& psi0, const DimerParams& p, const FockSpace& space,
                                         double t_final, std::int64_t n_traj, std::uint64_t seed,
                                         const std::vector<NamedOperator>& observables = {},
                                         const JumpOptions& opt = {});

/// Single trajectory `index` of a run. Fills `values` as [sample][observable]
/// (observables plus the two bookkeeping columns) and returns the jump record.
std::vector<JumpRecord> jump_trajectory(const StateVector& psi0, const Lindbladian& gen, const std::vector<double>& grid,
                                        std::uint64_t seed, std::uint64_t index,
                                        const std::vector<NamedOperator>& observables, const JumpOptions& opt,
                                        std::vector<cplx>& values);

}  // namespace bhd::fock
