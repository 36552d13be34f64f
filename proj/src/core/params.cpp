// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/core/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bhd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

void DimerParams::validate() const {
  require(std::isfinite(delta), "delta must be finite");
  require(std::isfinite(j_coupling), "j_coupling must be finite");
  require(std::isfinite(f_tilde), "f_tilde must be finite");
  require(std::isfinite(u_tilde) && u_tilde >= 0.0, "u_tilde must be >= 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
  require(std::isfinite(n_scale) && n_scale > 0.0, "n_scale must be > 0");
}

BareParams bare_params(const DimerParams& p) {
  if (!(p.n_scale > 0.0)) throw std::invalid_argument("n_scale must be > 0");
  return {p.f_tilde * std::sqrt(p.n_scale), p.u_tilde / p.n_scale};
}

SiteAmplitudes to_site_basis(const ModeState& s) {
  return {(s.alpha_b + s.alpha_a) * kInvSqrt2, (s.alpha_b - s.alpha_a) * kInvSqrt2};
}

ModeState from_site_basis(const SiteAmplitudes& s) {
  return {(s.alpha1 + s.alpha2) * kInvSqrt2, (s.alpha1 - s.alpha2) * kInvSqrt2};
}

}  // namespace bhd
