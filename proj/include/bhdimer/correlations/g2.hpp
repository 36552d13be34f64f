// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "bhdimer/fock/master.hpp"
#include "bhdimer/spectra/spectrum.hpp"

namespace bhd::correlations {

using fock::SpMat;

enum class Mode { One, Two, A, B };

std::string to_string(Mode m);
/// "1", "2", "A" or "B".
Mode mode_from_string(const std::string& s);

const SpMat& mode_operator(Mode m, const fock::ModeOperators& ops);

struct G2Curve {
  Mode mode = Mode::One;
  std::vector<double> taus;
  std::vector<double> values;
  double max_imag = 0.0;      // largest |Im| of the normalized trace
  double occupation = 0.0;    // <a^dag a> in the steady state
  double steady_residual = 0.0;
};

struct G2Options {
  double tau_max = 20.0;
  int n_points = 500;
  fock::MasterOptions master{1e-10, 1e-12, false, 1e-8};
};

/// Raised when <a^dag a>_ss is below 1e-12.
class VanishingOccupation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// g2(tau) = Tr[a^dag a e^{tau L}(rho')] / Tr[a^dag a rho_ss] with
/// rho' = a rho_ss a^dag / Tr[a^dag a rho_ss], propagated by the master-equation integrator.
G2Curve g2(Mode mode, const DimerParams& p, const fock::FockSpace& space, const G2Options& opt = {});
G2Curve g2(Mode mode, const fock::DensityOperator& rho_ss, const fock::Lindbladian& gen, const G2Options& opt = {});

/// <a^dag a^dag a a>_ss / <a^dag a>_ss^2.
double g2_zero_direct(Mode mode, const fock::DensityOperator& rho_ss, const fock::ModeOperators& ops);

/// rho' expanded over the k slowest modes of `spectrum` (left vectors required).
G2Curve g2_via_eigenmodes(Mode mode, const fock::DensityOperator& rho_ss, const fock::ModeOperators& ops,
                          const spectra::SpectrumResult& spectrum, int k, const std::vector<double>& taus);

/// Angular frequency of the tallest local maximum at or above 2 pi / (tau span)
/// in the spectrum of g2(tau) - 1, zero-padded eightfold without a window.
/// Assumes the curve has relaxed to 1 by the last tau. Returns 0 without a
/// qualifying peak. Needs at least 64 points.
double dominant_frequency(const G2Curve& curve);

}  // namespace bhd::correlations
