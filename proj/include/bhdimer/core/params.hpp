// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <utility>

namespace bhd {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Model constants in units of gamma. The drive and interaction are stored in
/// their rescaled form; bare values follow from `bare_params`.
struct DimerParams {
  double delta = 0.8;
  double j_coupling = 1.1;
  double u_tilde = 1.0;
  double f_tilde = 0.0;
  double gamma = 1.0;
  double kappa = 0.0;
  double n_scale = 1.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct BareParams {
  double drive;        // F = f_tilde * sqrt(N)
  double interaction;  // U = u_tilde / N
};

BareParams bare_params(const DimerParams& p);

/// Rescaled amplitudes of the bonding and antibonding modes.
struct ModeState {
  cplx alpha_b{};
  cplx alpha_a{};

  friend bool operator==(const ModeState&, const ModeState&) = default;
};

struct SiteAmplitudes {
  cplx alpha1{};
  cplx alpha2{};
};

SiteAmplitudes to_site_basis(const ModeState& s);
ModeState from_site_basis(const SiteAmplitudes& s);
inline ModeState from_site_basis(cplx alpha1, cplx alpha2) {
  return from_site_basis(SiteAmplitudes{alpha1, alpha2});
}

}  // namespace bhd
