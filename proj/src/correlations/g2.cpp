// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/correlations/g2.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bhdimer/analysis/fourier.hpp"
#include "bhdimer/fock/steady_state.hpp"

namespace bhd::correlations {

namespace {

struct Conditioned {
  fock::DensityOperator rho;
  double occupation;
};

Conditioned condition(const SpMat& a, const fock::DensityOperator& rho_ss) {
  const SpMat n = SpMat(a.adjoint()) * a;
  const double occ = fock::expectation(n, rho_ss).real();
  if (!(occ >= 1e-12)) throw VanishingOccupation("steady-state occupation below 1e-12; g2 undefined");
  fock::DensityOperator r = a * rho_ss;
  r = (r * SpMat(a.adjoint())).eval();
  return {r / occ, occ};
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::One: return "1";
    case Mode::Two: return "2";
    case Mode::A: return "A";
    case Mode::B: return "B";
  }
  return "1";
}

Mode mode_from_string(const std::string& s) {
  if (s == "1") return Mode::One;
  if (s == "2") return Mode::Two;
  if (s == "A" || s == "a") return Mode::A;
  if (s == "B" || s == "b") return Mode::B;
  throw std::invalid_argument("unknown g2 mode: " + s);
}

const SpMat& mode_operator(Mode m, const fock::ModeOperators& ops) {
  switch (m) {
    case Mode::One: return ops.a1;
    case Mode::Two: return ops.a2;
    case Mode::A: return ops.a_a;
    case Mode::B: return ops.a_b;
  }
  return ops.a1;
}

G2Curve g2(Mode mode, const DimerParams& p, const fock::FockSpace& space, const G2Options& opt) {
  const auto ss = fock::steady_state_solve(p, space);
  const fock::Lindbladian gen(p, space);
  G2Curve c = g2(mode, ss.rho, gen, opt);
  c.steady_residual = ss.residual;
  return c;
}

G2Curve g2(Mode mode, const fock::DensityOperator& rho_ss, const fock::Lindbladian& gen, const G2Options& opt) {
  if (opt.n_points < 2 || !(opt.tau_max > 0.0)) throw std::invalid_argument("g2 needs tau_max > 0 and n_points >= 2");
  const SpMat& a = mode_operator(mode, gen.operators());
  const auto cond = condition(a, rho_ss);
  const SpMat n = SpMat(a.adjoint()) * a;
  const double dt = opt.tau_max / (opt.n_points - 1);
  const auto series = fock::integrate_master(cond.rho, gen, opt.tau_max, dt, {{"n", n}}, opt.master);
  G2Curve c;
  c.mode = mode;
  c.occupation = cond.occupation;
  c.taus = series.times;
  c.values.reserve(series.times.size());
  for (const cplx v : series.values[0]) {
    const cplx g = v / cond.occupation;
    c.values.push_back(g.real());
    c.max_imag = std::max(c.max_imag, std::abs(g.imag()));
  }
  return c;
}

double g2_zero_direct(Mode mode, const fock::DensityOperator& rho_ss, const fock::ModeOperators& ops) {
  const SpMat& a = mode_operator(mode, ops);
  const SpMat ad = a.adjoint();
  const SpMat n = ad * a;
  const SpMat n2 = SpMat(ad * ad) * SpMat(a * a);
  const double occ = fock::expectation(n, rho_ss).real();
  if (!(occ >= 1e-12)) throw VanishingOccupation("steady-state occupation below 1e-12; g2 undefined");
  return fock::expectation(n2, rho_ss).real() / (occ * occ);
}

G2Curve g2_via_eigenmodes(Mode mode, const fock::DensityOperator& rho_ss, const fock::ModeOperators& ops,
                          const spectra::SpectrumResult& spectrum, int k, const std::vector<double>& taus) {
  if (k < 1 || k > static_cast<int>(spectrum.modes.size())) throw std::invalid_argument("k out of range for the spectrum");
  const SpMat& a = mode_operator(mode, ops);
  const auto cond = condition(a, rho_ss);
  const SpMat n = SpMat(a.adjoint()) * a;
  spectra::SpectrumResult sub;
  sub.dim = spectrum.dim;
  sub.modes.assign(spectrum.modes.begin(), spectrum.modes.begin() + k);
  const auto coeffs = spectra::eigenmode_expansion(cond.rho, sub);
  std::vector<cplx> weight(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    weight[static_cast<std::size_t>(j)] = coeffs[static_cast<std::size_t>(j)] * fock::expectation(n, sub.modes[static_cast<std::size_t>(j)].matrix());
  G2Curve c;
  c.mode = mode;
  c.occupation = cond.occupation;
  c.taus = taus;
  for (const double t : taus) {
    cplx s = 0.0;
    for (int j = 0; j < k; ++j) s += weight[static_cast<std::size_t>(j)] * std::exp(sub.modes[static_cast<std::size_t>(j)].value * t);
    const cplx g = s / cond.occupation;
    c.values.push_back(g.real());
    c.max_imag = std::max(c.max_imag, std::abs(g.imag()));
  }
  return c;
}

double dominant_frequency(const G2Curve& curve) {
  if (curve.taus.size() < 64) throw std::invalid_argument("dominant_frequency needs at least 64 points");
  // explicit zero padding of g2 - 1 keeps the mean removal on the DC bin only
  std::vector<double> padded(8 * curve.values.size(), 0.0);
  for (std::size_t i = 0; i < curve.values.size(); ++i) padded[i] = curve.values[i] - 1.0;
  const auto spec = analysis::fourier_spectrum(padded, curve.taus[1] - curve.taus[0]);
  const double min_freq = 2.0 * std::numbers::pi / (curve.taus.back() - curve.taus.front());
  analysis::Peak best{0.0, 0.0};
  for (const auto& pk : analysis::detect_peaks(spec, 1e-3))
    if (pk.frequency >= min_freq && pk.magnitude > best.magnitude) best = pk;
  return best.frequency;
}

}  // namespace bhd::correlations
