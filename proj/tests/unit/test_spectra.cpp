// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "bhdimer/core/random.hpp"
#include "bhdimer/fock/master.hpp"
#include "bhdimer/fock/steady_state.hpp"
#include "bhdimer/semiclassical/mean_field.hpp"
#include "bhdimer/spectra/eigen.hpp"
#include "bhdimer/spectra/liouvillian.hpp"
#include "bhdimer/spectra/spectrum.hpp"

using namespace bhd;
using namespace bhd::spectra;
using Dense = Eigen::MatrixXcd;

namespace {

DimerParams drive(double f) {
  DimerParams p;
  p.f_tilde = f;
  return p;
}

Dense random_matrix(int d, std::mt19937_64& rng) {
  NormalSource n;
  Dense g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

Dense random_density(int d, std::mt19937_64& rng) {
  const Dense g = random_matrix(d, rng);
  Dense rho = g * g.adjoint();
  return rho / rho.trace().real();
}

std::vector<cplx> dense_spectrum(const SpMat& m) {
  Eigen::ComplexEigenSolver<Dense> es(Dense(m), false);
  std::vector<cplx> v(es.eigenvalues().begin(), es.eigenvalues().end());
  return v;
}

double match(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    double best = INFINITY;
    std::size_t bi = 0;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!used[j] && std::abs(x - b[j]) < best) best = std::abs(x - b[j]), bi = j;
    used[bi] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("row-wise vectorization round trip") {
  std::mt19937_64 rng(1);
  const Dense r = random_matrix(5, rng);
  const auto v = vectorize(r);
  CHECK(v[2 * 5 + 3] == r(2, 3));
  CHECK(unvectorize(v) == r);
}

TEST_CASE("superoperator of a sandwich") {
  std::mt19937_64 rng(2);
  const Dense a = random_matrix(4, rng), b = random_matrix(4, rng), r = random_matrix(4, rng);
  const SpMat sa = a.sparseView(), sb = b.sparseView();
  const Eigen::VectorXcd lhs = superoperator(sa, sb) * vectorize(r);
  CHECK((lhs - vectorize(a * r * b)).norm() < 1e-12);
}

TEST_CASE("assembled generator equals the Kronecker oracle and the direct right-hand side") {
  std::mt19937_64 rng(3);
  auto p = drive(0.9);
  p.kappa = 0.15;
  p.n_scale = 1.7;
  for (auto [n1, n2] : {std::pair{3, 3}, std::pair{3, 2}}) {
    const fock::FockSpace s(n1, n2);
    const auto l = build_liouvillian(p, s);
    const SpMat k = build_liouvillian_kron(p, s);
    CHECK(Dense(l.matrix - k).norm() < 1e-12);
    CHECK(l.sectors.has_value() == (n1 == n2));
    for (int i = 0; i < 20; ++i) {
      const Dense rho = random_density(s.dim(), rng);
      const Eigen::VectorXcd lv = l.matrix * vectorize(rho);
      CHECK((unvectorize(lv) - fock::lindblad_rhs(rho, p, s)).norm() < 1e-12);
    }
  }
}

TEST_CASE("trace row of the generator vanishes") {
  const fock::FockSpace s(3, 3);
  const auto l = build_liouvillian(drive(1.1), s);
  const Eigen::VectorXcd w = vectorize(Dense::Identity(s.dim(), s.dim()));
  const Eigen::RowVectorXcd row = w.transpose() * Dense(l.matrix);
  CHECK(row.norm() < 1e-12);
}

TEST_CASE("parity operator") {
  const fock::FockSpace s(3, 3);
  const Dense pm(parity_operator(s));
  CHECK((pm * pm - Dense::Identity(s.dim(), s.dim())).norm() == 0.0);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(s.dim());
  e[s.index(2, 1)] = 1.0;
  const Eigen::VectorXcd pe = pm * e;
  CHECK(pe[s.index(1, 2)] == cplx(-1.0));
  CHECK(Dense(parity_superoperator(s)) == Dense(superoperator(parity_operator(s), SpMat(parity_operator(s).adjoint()))));
  CHECK_THROWS(parity_operator(fock::FockSpace(2, 3)));
}

TEST_CASE("generator commutes exactly with parity") {
  for (double f : {0.3, 1.2}) {
    auto p = drive(f);
    p.kappa = 0.1;
    const fock::FockSpace s(3, 3);
    const auto l = build_liouvillian(p, s);
    CHECK(parity_commutator_norm(l.matrix, *l.sectors) == 0.0);
    const Dense ps(parity_superoperator(s));
    CHECK((ps * Dense(l.matrix) - Dense(l.matrix) * ps).norm() < 1e-12);
  }
}

TEST_CASE("sector sizes match the parity eigenspaces") {
  for (int n : {1, 2, 3}) {
    const fock::FockSpace s(n, n);
    const auto map = build_sector_map(s);
    const auto ev = dense_spectrum(parity_superoperator(s));
    const int plus = static_cast<int>(std::count_if(ev.begin(), ev.end(), [](cplx z) { return z.real() > 0; }));
    CHECK(map.size(+1) == plus);
    CHECK(map.size(-1) == s.dim() * s.dim() - plus);
    CHECK(map.sector_permutation().size() == static_cast<std::size_t>(s.dim() * s.dim()));
  }
  const auto m2 = build_sector_map(fock::FockSpace(2, 2));
  CHECK(m2.size(+1) == 45);
  CHECK(m2.size(-1) == 36);
}

TEST_CASE("sector bases are orthonormal parity eigenvectors") {
  const fock::FockSpace s(2, 2);
  const auto map = build_sector_map(s);
  const Dense ps(parity_superoperator(s));
  for (int sector : {+1, -1}) {
    const int n = map.size(sector);
    Dense v(s.dim() * s.dim(), n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
      y[k] = 1.0;
      v.col(k) = lift(map, sector, y);
      CHECK((project(map, sector, v.col(k)) - y).norm() < 1e-15);
    }
    CHECK((v.adjoint() * v - Dense::Identity(n, n)).norm() < 1e-14);
    CHECK((ps * v - static_cast<double>(sector) * v).norm() < 1e-14);
  }
}

TEST_CASE("sector blocks are the restricted generator") {
  const fock::FockSpace s(2, 2);
  const auto l = build_liouvillian(drive(0.8), s);
  const auto blocks = sector_decompose(l);
  CHECK(blocks.max_cross_entry == 0.0);
  const auto& map = *l.sectors;
  for (int sector : {+1, -1}) {
    const int n = map.size(sector);
    Dense v(s.dim() * s.dim(), n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
      y[k] = 1.0;
      v.col(k) = lift(map, sector, y);
    }
    const Dense restricted = v.adjoint() * Dense(l.matrix) * v;
    CHECK((restricted - Dense(sector > 0 ? blocks.plus : blocks.minus)).norm() < 1e-13);
  }
  const auto tf = trace_functional(map, s, +1);
  const Eigen::RowVectorXcd row = tf.transpose() * Dense(blocks.plus);
  CHECK(row.norm() < 1e-12);
}

TEST_CASE("block spectra union the full spectrum") {
  const fock::FockSpace s(2, 2);
  const auto l = build_liouvillian(drive(1.2), s);
  const auto blocks = sector_decompose(l);
  auto plus = dense_spectrum(blocks.plus);
  const auto minus = dense_spectrum(blocks.minus);
  plus.insert(plus.end(), minus.begin(), minus.end());
  CHECK(match(dense_spectrum(l.matrix), plus) < 1e-8);
}

TEST_CASE("Krylov paths agree with the dense eigensolver") {
  const fock::FockSpace s(3, 3);
  const auto blocks = sector_decompose(build_liouvillian(drive(0.9), s));
  for (const SpMat* b : {&blocks.plus, &blocks.minus}) {
    auto all = dense_spectrum(*b);
    std::sort(all.begin(), all.end(), [](cplx x, cplx y) { return std::abs(x.real()) < std::abs(y.real()); });
    for (auto tr : {Transform::Propagator, Transform::Dense}) {
      EigenOptions o;
      o.transform = tr;
      const auto r = leading_eigenvalues(*b, 6, o, true);
      CHECK(r.used == tr);
      REQUIRE(r.pairs.size() == 6);
      for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        CHECK(std::abs(std::abs(r.pairs[i].value.real()) - std::abs(all[i].real())) < 1e-8);
        CHECK(r.pairs[i].residual < 1e-8);
        const Eigen::VectorXcd res = *b * r.pairs[i].vector - r.pairs[i].value * r.pairs[i].vector;
        CHECK(res.norm() < 1e-8);
        const Eigen::RowVectorXcd lres = r.left[i].adjoint() * *b - r.pairs[i].value * r.left[i].adjoint();
        CHECK(lres.norm() < 1e-7 * r.left[i].norm());
      }
    }
    EigenOptions si;
    si.transform = Transform::ShiftInvert;
    si.target = Target::NearestZero;
    const auto r = leading_eigenvalues(*b, 3, si);
    auto near = dense_spectrum(*b);
    std::sort(near.begin(), near.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(std::abs(r.pairs[i].value) - std::abs(near[i])) < 1e-8);
  }
}

TEST_CASE("transform names") {
  CHECK(transform_from_string("propagator") == Transform::Propagator);
  CHECK(to_string(Transform::ShiftInvert) == "shift-invert");
  CHECK_THROWS(transform_from_string("arnoldi"));
  CHECK(target_distance(cplx(-0.3, 4.0), Target::SmallestAbsReal) == doctest::Approx(0.3));
  CHECK(target_distance(cplx(-0.3, 0.4), Target::NearestZero) == doctest::Approx(0.5));
}

TEST_CASE("sector spectra are closed under conjugation") {
  const fock::FockSpace s(2, 2);
  const auto blocks = sector_decompose(build_liouvillian(drive(0.7), s));
  for (const SpMat* b : {&blocks.plus, &blocks.minus}) {
    const auto ev = dense_spectrum(*b);
    for (const auto& z : ev) {
      double best = INFINITY;
      for (const auto& w : ev) best = std::min(best, std::abs(w - std::conj(z)));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("spectrum modes carry their parity and the zero mode is the steady state") {
  const auto p = drive(1.2);
  const fock::FockSpace s(3, 3);
  SpectrumOptions o;
  o.k_plus = 5;
  o.k_minus = 3;
  o.with_left = true;
  const auto spec = compute_spectrum(p, s, o);
  REQUIRE(spec.modes.size() == 8);
  const auto* zero = spec.steady();
  REQUIRE(zero != nullptr);
  CHECK(std::abs(zero->value) < kZeroEigenvalue);
  CHECK(std::abs(zero->matrix().trace() - 1.0) < 1e-12);
  CHECK(fock::trace_distance(zero->matrix(), fock::steady_state(p, s)) < 1e-8);
  const Dense pm(parity_operator(s));
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const auto& m = spec.modes[i];
    const Dense r = m.matrix();
    CHECK((pm * r * pm.adjoint() - static_cast<double>(m.sector) * r).norm() < 1e-10 * r.norm());
    if (i > 0) CHECK(std::abs(m.value.real()) >= std::abs(spec.modes[i - 1].value.real()) - 1e-12);
    CHECK(m.residual < 1e-8);
    CHECK(m.value.real() <= 1e-9);
  }
}

TEST_CASE("eigenmode expansion reconstructs the dynamics") {
  const auto p = drive(0.6);
  const fock::FockSpace s(2, 2);
  SpectrumOptions o;
  o.k_plus = 45;
  o.k_minus = 36;
  o.with_left = true;
  const auto spec = compute_spectrum(p, s, o);
  std::mt19937_64 rng(6);
  const Dense rho0 = random_density(s.dim(), rng);
  const auto c = eigenmode_expansion(rho0, spec);
  const auto* zero = spec.steady();
  for (std::size_t i = 0; i < spec.modes.size(); ++i)
    if (&spec.modes[i] == zero) CHECK(std::abs(c[i] - 1.0) < 1e-10);
  CHECK((reconstruct(spec, c, 0.0) - rho0).norm() < 1e-9);
  const Dense rt = fock::propagate(rho0, fock::Lindbladian(p, s), 1.5);
  CHECK((reconstruct(spec, c, 1.5) - rt).norm() < 1e-8);

  // a parity-symmetric state has no weight on odd modes
  const Dense pm(parity_operator(s));
  const Dense sym = 0.5 * (rho0 + pm * rho0 * pm.adjoint());
  const auto cs = eigenmode_expansion(sym, spec);
  for (std::size_t i = 0; i < spec.modes.size(); ++i)
    if (spec.modes[i].sector < 0) CHECK(std::abs(cs[i]) < 1e-10);
}

TEST_CASE("steady state expands onto the zero mode alone") {
  const auto p = drive(0.5);
  const fock::FockSpace s(3, 3);
  SpectrumOptions o;
  o.k_plus = 10;
  o.k_minus = 4;
  o.with_left = true;
  const auto spec = compute_spectrum(p, s, o);
  const auto c = eigenmode_expansion(fock::steady_state(p, s), spec);
  const auto* zero = spec.steady();
  REQUIRE(zero != nullptr);
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    if (&spec.modes[i] == zero)
      CHECK(std::abs(c[i] - 1.0) < 1e-8);
    else
      CHECK(std::abs(c[i]) < 1e-8);
  }
}

TEST_CASE("ten slow modes reproduce the late bonding amplitude") {
  const auto p = drive(0.5);
  const fock::FockSpace s(3, 3);
  const fock::Lindbladian gen(p, s);
  SpectrumOptions o;
  o.k_plus = 10;
  o.k_minus = 0;
  o.with_left = true;
  const auto spec = compute_spectrum(p, s, o);
  // the vacuum is parity even, so the odd sector does not enter
  Dense rho0 = Dense::Zero(s.dim(), s.dim());
  rho0(0, 0) = 1.0;
  const auto c = eigenmode_expansion(rho0, spec);
  const auto& a_b = gen.operators().a_b;
  double worst = 0.0;
  for (double t = 5.0; t <= 20.0; t += 0.5) {
    const cplx approx = fock::expectation(a_b, reconstruct(spec, c, t));
    const cplx exact = fock::expectation(a_b, fock::propagate(rho0, gen, t));
    worst = std::max(worst, std::abs(approx - exact));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("odd-sector gap is largest inside the instability window and real there") {
  GapSweepOptions o;
  o.k_plus = 6;
  o.k_minus = 2;
  const std::vector<double> fs = {0.5, 0.8, 1.0, 1.2, 1.4, 1.8};
  const auto pts = gap_sweep(drive(0.0), fs, {2.0}, o);
  REQUIRE(pts.size() == fs.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].l1m.has_value());
    if (pts[i].l1m->real() > pts[best].l1m->real()) best = i;
  }
  CHECK(pts[best].f_tilde > 0.927);
  CHECK(pts[best].f_tilde < 1.596);
  CHECK(std::abs(pts[best].l1m->imag()) < kRealEigenvalue);
}

TEST_CASE("even-sector oscillation frequency approaches the semiclassical one at N = 5") {
  GapSweepOptions o;
  o.k_plus = 8;
  o.k_minus = 0;
  const auto pts = gap_sweep(drive(0.0), {0.3, 0.8}, {5.0}, o);
  for (const auto& g : pts) {
    REQUIRE(g.l2p.has_value());
    CHECK(!g.l1m.has_value());
    const double w = std::abs(semiclassical::symmetric_fp_eigenvalues(drive(g.f_tilde))[2].imag());
    CHECK(std::abs(std::abs(g.l2p->imag()) - w) < 0.25 * w);
  }
}

TEST_CASE("spectral cutoff") {
  CHECK(spectral_cutoff(1.0) == 6);
  CHECK(spectral_cutoff(5.0) == 18);
  CHECK(spectral_cutoff(0.5) == 5);
  CHECK_THROWS_AS(spectral_cutoff(0.0), std::invalid_argument);
}

TEST_CASE("scaling fit recovers a power law") {
  const std::vector<double> n = {1, 2, 3, 5, 8};
  std::vector<double> l;
  for (double x : n) l.push_back(2.0 * std::pow(x, -0.52));
  const auto f = scaling_fit(n, l);
  CHECK(f.beta == doctest::Approx(-0.52).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(scaling_fit({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_fit({1, 2, 3}, {1, -2, 3}), std::invalid_argument);
}

TEST_CASE("memory cap") {
  BuildOptions o;
  o.memory_cap_bytes = 1e3;
  const fock::FockSpace s(4, 4);
  try {
    build_liouvillian(drive(0.5), s, o);
    FAIL("expected the cap to trigger");
  } catch (const MemoryCapExceeded& e) {
    CHECK(e.required_dimension() == 625);
    CHECK(e.estimated_bytes() == doctest::Approx(estimate_liouvillian_bytes(s)));
  }
}

TEST_CASE("gap sweep labels eigenvalues by sector and type") {
  GapSweepOptions o;
  o.cutoff = [](double) { return 2; };
  o.k_plus = 10;
  const auto pts = gap_sweep(drive(0.0), {0.5, 1.2}, {1.0}, o);
  REQUIRE(pts.size() == 2);
  for (const auto& g : pts) {
    CHECK(g.error.empty());
    REQUIRE(g.l2p.has_value());
    REQUIRE(g.l1m.has_value());
    CHECK(g.l2p->imag() > 0.0);
    auto p = drive(g.f_tilde);
    const auto blocks = sector_decompose(build_liouvillian(p, fock::FockSpace(2, 2)));
    auto minus = dense_spectrum(blocks.minus);
    double best = INFINITY;
    for (const auto& z : minus) best = std::min(best, std::abs(z.real()));
    CHECK(std::abs(std::abs(g.l1m->real()) - best) < 1e-8);
  }
}
