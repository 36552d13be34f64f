// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bhdimer/analysis/fourier.hpp"
#include "bhdimer/correlations/g2.hpp"
#include "bhdimer/fock/steady_state.hpp"

using namespace bhd;
using namespace bhd::correlations;

namespace {

DimerParams drive(double f) {
  DimerParams p;
  p.f_tilde = f;
  return p;
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(mode_from_string("B") == Mode::B);
  CHECK(mode_from_string("1") == Mode::One);
  CHECK(to_string(Mode::A) == "A");
  CHECK_THROWS(mode_from_string("C"));
}

TEST_CASE("zero-delay value equals the fourth moment") {
  const auto p = drive(1.0);
  const fock::FockSpace s(6, 6);
  const fock::Lindbladian gen(p, s);
  const auto rho = fock::steady_state(p, s);
  G2Options o;
  o.tau_max = 5.0;
  o.n_points = 50;
  for (auto m : {Mode::One, Mode::Two, Mode::A, Mode::B}) {
    const auto c = g2(m, rho, gen, o);
    CHECK(std::abs(c.values.front() - g2_zero_direct(m, rho, gen.operators())) < 1e-10);
    CHECK(c.max_imag < 1e-8);
    CHECK(c.taus.size() == 50);
    CHECK(c.taus.back() == doctest::Approx(5.0));
  }
}

TEST_CASE("coherent steady state is second-order coherent") {
  auto p = drive(0.1);
  p.u_tilde = 0.0;
  p.kappa = 0.5;
  const fock::FockSpace s(8, 8);
  G2Options o;
  o.tau_max = 10.0;
  o.n_points = 40;
  for (auto m : {Mode::One, Mode::A}) {
    const auto c = g2(m, p, s, o);
    for (double v : c.values) CHECK(std::abs(v - 1.0) < 1e-6);
  }
}

TEST_CASE("correlations decay to one at long delays") {
  const auto p = drive(1.2);
  const int nmax = fock::suggested_cutoff(1.0, 1.2);
  const fock::FockSpace s(nmax, nmax);
  G2Options o;
  o.tau_max = 50.0;
  o.n_points = 51;
  for (auto m : {Mode::One, Mode::B}) CHECK(std::abs(g2(m, p, s, o).values.back() - 1.0) < 1e-4);
}

TEST_CASE("the first detection leaves a density operator") {
  const auto p = drive(1.2);
  const fock::FockSpace s(6, 6);
  const fock::Lindbladian gen(p, s);
  const auto rho = fock::steady_state(p, s);
  for (auto m : {Mode::One, Mode::Two, Mode::A, Mode::B}) {
    const auto& a = mode_operator(m, gen.operators());
    fock::DensityOperator r = a * rho * a.adjoint();
    r /= r.trace().real();
    CHECK((r - r.adjoint()).norm() < 1e-12);
    CHECK(std::abs(r.trace() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<fock::DensityOperator> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("empty modes are rejected") {
  auto p = drive(0.0);
  p.kappa = 0.3;
  CHECK_THROWS_AS(g2(Mode::One, p, fock::FockSpace(3, 3)), VanishingOccupation);
}

TEST_CASE("eigenmode expansion reproduces the propagated curve") {
  const auto p = drive(0.8);
  const fock::FockSpace s(2, 2);
  spectra::SpectrumOptions so;
  so.k_plus = 45;
  so.k_minus = 36;
  so.with_left = true;
  const auto spec = spectra::compute_spectrum(p, s, so);
  const fock::Lindbladian gen(p, s);
  const auto rho = fock::steady_state(p, s);
  G2Options o;
  o.tau_max = 6.0;
  o.n_points = 31;
  const auto direct = g2(Mode::One, rho, gen, o);
  const auto full = g2_via_eigenmodes(Mode::One, rho, gen.operators(), spec, 81, direct.taus);
  for (std::size_t i = 0; i < direct.values.size(); ++i) CHECK(std::abs(direct.values[i] - full.values[i]) < 1e-8);
  const auto one = g2_via_eigenmodes(Mode::One, rho, gen.operators(), spec, 1, direct.taus);
  for (double v : one.values) CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("region III curves follow the slowest oscillating mode") {
  const auto p = drive(1.2);
  const int nmax = fock::suggested_cutoff(1.0, 1.2);
  const fock::FockSpace s(nmax, nmax);
  const fock::Lindbladian gen(p, s);
  const auto rho = fock::steady_state(p, s);
  spectra::SpectrumOptions so;
  so.k_plus = 6;
  so.k_minus = 6;
  so.with_left = true;
  const auto spec = spectra::compute_spectrum(p, s, so);
  cplx l2 = 0.0;
  for (const auto& mo : spec.modes)
    if (mo.sector > 0 && std::abs(mo.value.imag()) >= spectra::kRealEigenvalue) {
      l2 = mo.value;
      break;
    }
  REQUIRE(l2 != 0.0);
  const double period = 2.0 * std::numbers::pi / std::abs(l2.imag());
  for (auto m : {Mode::One, Mode::B}) {
    const auto c = g2(m, rho, gen);
    CHECK(std::abs(dominant_frequency(c) - std::abs(l2.imag())) < 0.05 * std::abs(l2.imag()));
    std::vector<double> t, v;
    for (std::size_t i = 0; i < c.taus.size(); ++i)
      if (c.taus[i] >= 2.0) t.push_back(c.taus[i]), v.push_back(c.values[i]);
    const double rate = analysis::envelope_decay_rate(t, v, period);
    CHECK(std::abs(rate - std::abs(l2.real())) < 0.2 * std::abs(l2.real()));
    // five slow modes carry the tail
    const auto few = g2_via_eigenmodes(m, rho, gen.operators(), spec, 5, c.taus);
    double tail = 0.0;
    for (std::size_t i = 0; i < c.taus.size(); ++i)
      if (c.taus[i] > 5.0) tail = std::max(tail, std::abs(c.values[i] - few.values[i]));
    CHECK(tail < 1e-2);
  }
}

TEST_CASE("dominant frequency of a damped oscillation") {
  G2Curve c;
  for (int i = 0; i < 500; ++i) {
    const double t = 20.0 * i / 499.0;
    c.taus.push_back(t);
    c.values.push_back(1.0 + 0.5 * std::exp(-0.3 * t) * std::cos(2.5 * t));
  }
  CHECK(std::abs(dominant_frequency(c) - 2.5) / 2.5 < 0.02);
  // a strong non-oscillating decay on top of a weak oscillation
  for (std::size_t i = 0; i < c.taus.size(); ++i) {
    const double t = c.taus[i];
    c.values[i] = 1.0 + 0.3 * std::exp(-0.5 * t) + 0.1 * std::exp(-0.3 * t) * std::cos(2.5 * t);
  }
  CHECK(std::abs(dominant_frequency(c) - 2.5) / 2.5 < 0.05);
  c.taus.resize(10);
  c.values.resize(10);
  CHECK_THROWS_AS(dominant_frequency(c), std::invalid_argument);
}
