// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bhdimer/core/params.hpp"

namespace bhd::spectra {

enum class Transform { Auto, Propagator, ShiftInvert, Dense };
enum class Target { SmallestAbsReal, NearestZero };

std::string to_string(Transform t);
Transform transform_from_string(const std::string& s);

struct EigenOptions {
  Transform transform = Transform::Auto;
  Target target = Target::SmallestAbsReal;
  int dense_threshold = 500;
  double tau = 1.5;            // propagator time exp(tau (B - c))
  int taylor_degree = 4;       // terms per substep; 0 sums each substep to rounding
  double taylor_theta = 2.0;   // norm bound per substep
  double shift = -1e-6;        // shift-invert shift
  int krylov_dim = 0;          // 0: max(2k + 16, 32)
  int max_restarts = 400;
  double ritz_tol = 1e-10;     // relative residual in the transformed problem before verification
  double residual_tol = 1e-8;  // ||B x - lambda x|| / ||x||
  std::uint64_t seed = 12345;
  Eigen::VectorXcd start;      // optional warm start
};

struct EigenPair {
  cplx value;
  Eigen::VectorXcd vector;  // unit norm
  double residual = 0.0;
};

struct EigenResult {
  std::vector<EigenPair> pairs;        // ordered by the target criterion
  std::vector<Eigen::VectorXcd> left;  // w_j with w_j^H B = lambda_j w_j^H, when requested
  Transform used = Transform::Dense;
  int restarts = 0;
  std::int64_t operator_applications = 0;
};

class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), residual_(achieved_residual) {}
  double achieved_residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// k eigenvalues of a sparse block ordered by the target: smallest |Re| or
/// smallest modulus. Dense below the threshold; above it Krylov-Schur on a
/// polynomial filter approximating exp(tau (B - c)), c = tr(B)/n, or on
/// (B - shift)^-1. Every pair is verified on B itself.
EigenResult leading_eigenvalues(const Eigen::SparseMatrix<cplx>& b, int k, const EigenOptions& opt = {},
                                bool with_left = false);

/// Ordering key used for the target: smaller is closer.
double target_distance(cplx lambda, Target t);

}  // namespace bhd::spectra
