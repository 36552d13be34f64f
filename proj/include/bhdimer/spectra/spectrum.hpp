// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bhdimer/spectra/eigen.hpp"
#include "bhdimer/spectra/liouvillian.hpp"

namespace bhd::spectra {

constexpr double kZeroEigenvalue = 1e-9;
constexpr double kRealEigenvalue = 1e-7;

struct Eigenmode {
  cplx value;
  int sector = 0;  // +1, -1, or 0 when no parity decomposition was used
  double residual = 0.0;
  Eigen::VectorXcd right;  // full vectorized space; the zero mode carries unit trace
  Eigen::VectorXcd left;   // empty unless requested

  Eigen::MatrixXcd matrix() const { return unvectorize(right); }
};

struct SpectrumOptions {
  int k_plus = 6;
  int k_minus = 4;
  bool with_left = false;
  EigenOptions eigen;
  BuildOptions build;
};

struct SpectrumResult {
  int dim = 0;
  std::vector<Eigenmode> modes;  // ascending |Re lambda|

  /// The zero mode, if one was found.
  const Eigenmode* steady() const;
};

/// Leading eigenmodes of both parity sectors (or of the full generator for
/// unequal cutoffs, with k_plus + k_minus modes).
SpectrumResult compute_spectrum(const DimerParams& p, const FockSpace& space, const SpectrumOptions& opt = {});

class IllConditionedExpansion : public std::runtime_error {
 public:
  IllConditionedExpansion(const std::string& what, double cond) : std::runtime_error(what), cond_(cond) {}
  double condition_number() const noexcept { return cond_; }

 private:
  double cond_;
};

/// c_j such that sum_j c_j rho_j is the oblique projection of rho0 onto the
/// computed modes, from the left eigenvectors. Throws when the overlap matrix
/// has condition number above 1e12.
std::vector<cplx> eigenmode_expansion(const Eigen::MatrixXcd& rho0, const SpectrumResult& spectrum);

/// sum_j c_j exp(lambda_j t) rho_j.
Eigen::MatrixXcd reconstruct(const SpectrumResult& spectrum, const std::vector<cplx>& coeffs, double t);

/// Per-mode cutoff for spectral work: ceil(3 N) + 3.
int spectral_cutoff(double n_scale);

struct GapPoint {
  double n_scale = 0.0;
  double f_tilde = 0.0;
  int nmax = 0;
  std::optional<cplx> l1p;  // smallest |Re| nonzero real eigenvalue, + sector
  std::optional<cplx> l2p;  // smallest |Re| complex eigenvalue, + sector (Im > 0 member)
  std::optional<cplx> l1m;  // smallest |Re| eigenvalue, - sector
  double max_residual = 0.0;
  double seconds = 0.0;
  std::string error;
};

struct GapSweepOptions {
  int k_plus = 8;
  int k_minus = 2;  // 0 skips the sector, likewise k_plus
  EigenOptions eigen;
  BuildOptions build;
  unsigned threads = 1;
  bool warm_start = true;
  std::function<int(double)> cutoff;  // defaults to spectral_cutoff
  std::function<void(const GapPoint&)> on_point;
};

/// Eigensolver failures are recorded per point and the sweep continues.
std::vector<GapPoint> gap_sweep(const DimerParams& base, const std::vector<double>& f_grid,
                                const std::vector<double>& n_values, const GapSweepOptions& opt = {});

struct ScalingFit {
  double beta = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (log N, log lambda).
ScalingFit scaling_fit(const std::vector<double>& n_values, const std::vector<double>& lambda_values);

}  // namespace bhd::spectra
