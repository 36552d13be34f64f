// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "bhdimer/fock/operators.hpp"

namespace bhd::fock {

class DegenerateSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SteadyStateOptions {
  double residual_tol = 1e-9;
  bool check_degeneracy = true;
  /// Largest sector block solved by sparse LU on the bordered system.
  int direct_limit = 200000;
};

struct SteadyStateResult {
  DensityOperator rho;
  double residual = 0.0;  // ||L vec(rho)||_2
};

/// Null vector of the vectorized generator: the + parity block with one row
/// replaced by the trace functional is solved directly, then the result is
/// Hermitized and normalized. Throws DegenerateSteadyState when a second
/// eigenvalue of the generator sits at zero.
SteadyStateResult steady_state_solve(const DimerParams& p, const FockSpace& space, const SteadyStateOptions& opt = {});

DensityOperator steady_state(const DimerParams& p, const FockSpace& space);

}  // namespace bhd::fock
