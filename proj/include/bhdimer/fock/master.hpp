// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "bhdimer/core/dopri5.hpp"
#include "bhdimer/fock/operators.hpp"

namespace bhd::fock {

struct JumpChannel {
  std::string name;
  SpMat op;
  double rate;
};

/// Generator of the master equation: -i[H, rho] + gamma D[a1 + a2] + kappa (D[a1] + D[a2]).
class Lindbladian {
 public:
  Lindbladian(const DimerParams& p, const FockSpace& space);

  const FockSpace& space() const noexcept { return space_; }
  const ModeOperators& operators() const noexcept { return ops_; }
  const SpMat& hamiltonian() const noexcept { return h_; }
  /// H - (i/2) sum_k rate_k L_k^dag L_k
  const SpMat& effective_hamiltonian() const noexcept { return h_eff_; }
  /// sum_k rate_k L_k^dag L_k
  const SpMat& total_rate_operator() const noexcept { return rate_op_; }
  const std::vector<JumpChannel>& channels() const noexcept { return channels_; }

  void apply(const DensityOperator& rho, DensityOperator& out) const;
  DensityOperator apply(const DensityOperator& rho) const;

 private:
  FockSpace space_;
  ModeOperators ops_;
  SpMat h_, h_eff_, h_eff_adj_, rate_op_;
  std::vector<JumpChannel> channels_;
  std::vector<SpMat> channel_adj_;
};

DensityOperator lindblad_rhs(const DensityOperator& rho, const DimerParams& p, const FockSpace& space);

struct NamedOperator {
  std::string name;
  SpMat op;
};

/// a_A, a_B, a_A^dag a_A, a_B^dag a_B.
std::vector<NamedOperator> default_observables(const ModeOperators& ops);

struct MasterOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  bool check_positivity = true;
  double positivity_tolerance = 1e-8;
};

struct ExpectationSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<cplx>> values;  // [observable][sample]
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  bool positivity_violated = false;
  DensityOperator final_state;
};

/// Integrates the master equation and samples Tr(O rho) on a uniform grid
/// starting at t = 0. Positivity violations beyond the tolerance are flagged
/// in the result as a sign of insufficient truncation.
ExpectationSeries integrate_master(const DensityOperator& rho0, const DimerParams& p, const FockSpace& space,
                                   double t_final, double sample_interval,
                                   const std::vector<NamedOperator>& observables = {},
                                   const MasterOptions& opt = {});

ExpectationSeries integrate_master(const DensityOperator& rho0, const Lindbladian& gen, double t_final,
                                   double sample_interval, const std::vector<NamedOperator>& observables,
                                   const MasterOptions& opt = {});

/// Propagates rho to time t.
DensityOperator propagate(const DensityOperator& rho0, const Lindbladian& gen, double t,
                          const MasterOptions& opt = {});

}  // namespace bhd::fock
