// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/fock/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bhd::fock {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
using Triplet = Eigen::Triplet<cplx>;

SpMat from_triplets(int dim, const std::vector<Triplet>& t) {
  SpMat m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FockSpace::FockSpace(int nmax1, int nmax2) : nmax1_(nmax1), nmax2_(nmax2) {
  if (nmax1 < 0 || nmax2 < 0) throw std::invalid_argument("Fock cutoffs must be >= 0");
}

int suggested_cutoff(double n_scale, double f_tilde) {
  return static_cast<int>(std::ceil(3.0 * n_scale * std::max(1.0, f_tilde * f_tilde))) + 5;
}

ModeOperators build_operators(const FockSpace& s) {
  std::vector<Triplet> t1, t2;
  for (int i = 0; i < s.dim(); ++i) {
    const int n1 = s.n1(i), n2 = s.n2(i);
    if (n1 > 0) t1.emplace_back(s.index(n1 - 1, n2), i, std::sqrt(static_cast<double>(n1)));
    if (n2 > 0) t2.emplace_back(s.index(n1, n2 - 1), i, std::sqrt(static_cast<double>(n2)));
  }
  ModeOperators ops;
  ops.a1 = from_triplets(s.dim(), t1);
  ops.a2 = from_triplets(s.dim(), t2);
  ops.a_b = (kInvSqrt2 * (ops.a1 + ops.a2)).pruned();
  ops.a_a = (kInvSqrt2 * (ops.a1 - ops.a2)).pruned();
  return ops;
}

SpMat build_hamiltonian_12(const DimerParams& p, const FockSpace& s) {
  const auto [f, u] = bare_params(p);
  std::vector<Triplet> t;
  for (int i = 0; i < s.dim(); ++i) {
    const int n1 = s.n1(i), n2 = s.n2(i);
    const double d1 = n1, d2 = n2;
    const double diag = -p.delta * (d1 + d2) + u * (d1 * (d1 - 1.0) + d2 * (d2 - 1.0));
    if (diag != 0.0) t.emplace_back(i, i, diag);
    // -J (a1^dag a2 + a2^dag a1)
    if (n2 > 0 && n1 < s.nmax1()) {
      const double v = -p.j_coupling * std::sqrt((d1 + 1.0) * d2);
      const int k = s.index(n1 + 1, n2 - 1);
      t.emplace_back(k, i, v);
      t.emplace_back(i, k, v);
    }
    // F (a1 + a1^dag) - F (a2 + a2^dag)
    if (n1 < s.nmax1()) {
      const double v = f * std::sqrt(d1 + 1.0);
      const int k = s.index(n1 + 1, n2);
      t.emplace_back(k, i, v);
      t.emplace_back(i, k, v);
    }
    if (n2 < s.nmax2()) {
      const double v = -f * std::sqrt(d2 + 1.0);
      const int k = s.index(n1, n2 + 1);
      t.emplace_back(k, i, v);
      t.emplace_back(i, k, v);
    }
  }
  return from_triplets(s.dim(), t);
}

SpMat build_hamiltonian_BA(const DimerParams& p, const FockSpace& s) {
  const auto [f, u] = bare_params(p);
  const ModeOperators ops = build_operators(s);
  const SpMat b = ops.a_b, a = ops.a_a;
  const SpMat bd = SpMat(b.adjoint()), ad = SpMat(a.adjoint());
  const SpMat nb = bd * b, na = ad * a;
  SpMat h = (-p.delta - p.j_coupling) * nb + (-p.delta + p.j_coupling) * na;
  h += (std::sqrt(2.0) * f) * (ad + a);
  const SpMat bdbd = bd * bd, bb = b * b, adad = ad * ad, aa = a * a;
  SpMat quartic = bdbd * bb + adad * aa + bdbd * aa + adad * bb;
  quartic += 4.0 * SpMat(nb * na);
  h += (0.5 * u) * quartic;
  h = 0.5 * (h + SpMat(h.adjoint()));
  h.prune(cplx(0.0));
  h.makeCompressed();
  return h;
}

CoherentState coherent_state(cplx alpha1, cplx alpha2, const FockSpace& s) {
  auto amplitudes = [](cplx alpha, int nmax) {
    std::vector<cplx> c(static_cast<std::size_t>(nmax) + 1);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= nmax; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n) - 1] * alpha / std::sqrt(static_cast<double>(n));
    return c;
  };
  const auto c1 = amplitudes(alpha1, s.nmax1());
  const auto c2 = amplitudes(alpha2, s.nmax2());
  CoherentState out;
  out.vector.resize(s.dim());
  for (int i = 0; i < s.dim(); ++i)
    out.vector(i) = c1[static_cast<std::size_t>(s.n1(i))] * c2[static_cast<std::size_t>(s.n2(i))];
  const double kept = out.vector.squaredNorm();
  out.tail_mass = std::max(0.0, 1.0 - kept);
  out.vector /= std::sqrt(kept);
  return out;
}

cplx expectation(const SpMat& op, const DensityOperator& rho) {
  cplx acc{};
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

cplx expectation(const SpMat& op, const StateVector& psi) {
  const StateVector v = op * psi;
  return psi.dot(v) / psi.squaredNorm();
}

DensityDiagnostics diagnose(const DensityOperator& rho) {
  DensityDiagnostics d;
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - 1.0);
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityOperator projector(const StateVector& psi) { return psi * psi.adjoint(); }

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  const Eigen::MatrixXcd d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace bhd::fock
