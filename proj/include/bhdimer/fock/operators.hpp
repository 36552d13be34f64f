// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bhdimer/core/params.hpp"

namespace bhd::fock {

using SpMat = Eigen::SparseMatrix<cplx>;
using DensityOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Two-mode Fock space truncated at n_i <= nmax_i, ordered row-major over
/// (n1, n2): index = n1 * (nmax2 + 1) + n2.
class FockSpace {
 public:
  FockSpace(int nmax1, int nmax2);

  int nmax1() const noexcept { return nmax1_; }
  int nmax2() const noexcept { return nmax2_; }
  int dim() const noexcept { return (nmax1_ + 1) * (nmax2_ + 1); }
  int index(int n1, int n2) const noexcept { return n1 * (nmax2_ + 1) + n2; }
  int n1(int i) const noexcept { return i / (nmax2_ + 1); }
  int n2(int i) const noexcept { return i % (nmax2_ + 1); }
  bool symmetric() const noexcept { return nmax1_ == nmax2_; }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  int nmax1_;
  int nmax2_;
};

/// Cutoff per mode: ceil(3 N max(1, f^2)) + 5.
int suggested_cutoff(double n_scale, double f_tilde);

struct ModeOperators {
  SpMat a1, a2, a_b, a_a;
};

ModeOperators build_operators(const FockSpace& space);

/// Site-basis Hamiltonian with bare drive and interaction.
SpMat build_hamiltonian_12(const DimerParams& p, const FockSpace& space);

/// Bonding/antibonding form assembled from products of the truncated a_B, a_A.
SpMat build_hamiltonian_BA(const DimerParams& p, const FockSpace& space);

struct CoherentState {
  StateVector vector;
  double tail_mass = 0.0;  // probability outside the truncation before renormalising
};

CoherentState coherent_state(cplx alpha1, cplx alpha2, const FockSpace& space);

/// Tr(op * rho).
cplx expectation(const SpMat& op, const DensityOperator& rho);

/// <psi|op|psi> / <psi|psi>.
cplx expectation(const SpMat& op, const StateVector& psi);

struct DensityDiagnostics {
  double hermiticity_error;
  double trace_error;
  double min_eigenvalue;
};

DensityDiagnostics diagnose(const DensityOperator& rho);

DensityOperator projector(const StateVector& psi);

/// Trace norm distance 0.5 * ||a - b||_1 for Hermitian arguments.
double trace_distance(const DensityOperator& a, const DensityOperator& b);

}  // namespace bhd::fock
