// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/fock/steady_state.hpp"

#include <sstream>

#include <Eigen/SparseLU>

#include "bhdimer/spectra/eigen.hpp"
#include "bhdimer/spectra/liouvillian.hpp"
#include "bhdimer/spectra/spectrum.hpp"

namespace bhd::fock {

namespace {

Eigen::VectorXcd bordered_solve(const SpMat& b, int row, const Eigen::VectorXcd& functional) {
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(b.nonZeros()) + static_cast<std::size_t>(functional.size()));
  for (int c = 0; c < b.outerSize(); ++c)
    for (SpMat::InnerIterator it(b, c); it; ++it)
      if (it.row() != row) t.emplace_back(static_cast<int>(it.row()), c, it.value());
  for (Eigen::Index j = 0; j < functional.size(); ++j)
    if (functional(j) != cplx(0.0)) t.emplace_back(row, static_cast<int>(j), functional(j));
  SpMat a(b.rows(), b.cols());
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw DegenerateSteadyState("bordered steady-state system is singular: " + lu.lastErrorMessage());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(b.rows());
  rhs(row) = 1.0;
  Eigen::VectorXcd y = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !y.allFinite())
    throw DegenerateSteadyState("bordered steady-state solve failed");
  return y;
}

void check_isolated(const SpMat& block, int want_zero, const char* label) {
  if (block.rows() <= want_zero) return;
  spectra::EigenOptions eo;
  eo.target = spectra::Target::NearestZero;
  const auto res = spectra::leading_eigenvalues(block, want_zero + 1, eo);
  const cplx next = res.pairs[static_cast<std::size_t>(want_zero)].value;
  if (std::abs(next) < spectra::kZeroEigenvalue) {
    std::ostringstream os;
    os << "generator has an additional zero eigenvalue (" << next << ") in the " << label
       << " sector; the steady state is not unique";
    throw DegenerateSteadyState(os.str());
  }
}

}  // namespace

SteadyStateResult steady_state_solve(const DimerParams& p, const FockSpace& space, const SteadyStateOptions& opt) {
  const auto l = spectra::build_liouvillian(p, space);
  const int d = space.dim();
  Eigen::VectorXcd x;
  if (l.sectors) {
    const auto& m = *l.sectors;
    const auto blocks = spectra::sector_decompose(l);
    if (blocks.plus.rows() > opt.direct_limit) throw std::runtime_error("steady-state block exceeds the direct solve limit");
    if (opt.check_degeneracy) {
      check_isolated(blocks.plus, 1, "+");
      check_isolated(blocks.minus, 0, "-");
    }
    const int row = m.position[0][static_cast<std::size_t>(m.orbit_of[0])];
    const Eigen::VectorXcd t = spectra::trace_functional(m, space, +1);
    x = spectra::lift(m, +1, bordered_solve(blocks.plus, row, t));
  } else {
    if (opt.check_degeneracy) check_isolated(l.matrix, 1, "full");
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
    for (int k = 0; k < d; ++k) t(k * d + k) = 1.0;
    x = bordered_solve(l.matrix, 0, t);
  }
  SteadyStateResult out;
  DensityOperator rho = spectra::unvectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  out.rho = rho;
  out.residual = (l.matrix * spectra::vectorize(rho)).norm();
  if (!(out.residual < opt.residual_tol)) {
    std::ostringstream os;
    os << "steady-state residual " << out.residual << " exceeds " << opt.residual_tol;
    throw std::runtime_error(os.str());
  }
  return out;
}

DensityOperator steady_state(const DimerParams& p, const FockSpace& space) { return steady_state_solve(p, space).rho; }

}  // namespace bhd::fock
