// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/fock/master.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhdimer/core/grid.hpp"

namespace bhd::fock {

Lindbladian::Lindbladian(const DimerParams& p, const FockSpace& space)
    : space_(space), ops_(build_operators(space)), h_(build_hamiltonian_12(p, space)) {
  p.validate();
  channels_.push_back({"collective", SpMat(ops_.a1 + ops_.a2), p.gamma});
  if (p.kappa > 0.0) {
    channels_.push_back({"local1", ops_.a1, p.kappa});
    channels_.push_back({"local2", ops_.a2, p.kappa});
  }
  rate_op_.resize(space.dim(), space.dim());
  for (const auto& c : channels_) {
    const SpMat adj = c.op.adjoint();
    rate_op_ += c.rate * SpMat(adj * c.op);
    channel_adj_.push_back(adj);
  }
  h_eff_ = h_ - (0.5 * kI) * rate_op_;
  h_eff_.makeCompressed();
  h_eff_adj_ = h_eff_.adjoint();
}

void Lindbladian::apply(const DensityOperator& rho, DensityOperator& out) const {
  out.noalias() = (-kI) * (h_eff_ * rho);
  out.noalias() += kI * (rho * h_eff_adj_);
  DensityOperator tmp;
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    tmp.noalias() = channels_[k].op * rho;
    out.noalias() += channels_[k].rate * (tmp * channel_adj_[k]);
  }
}

DensityOperator Lindbladian::apply(const DensityOperator& rho) const {
  DensityOperator out;
  apply(rho, out);
  return out;
}

DensityOperator lindblad_rhs(const DensityOperator& rho, const DimerParams& p, const FockSpace& space) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw std::invalid_argument("density operator does not match the Fock space");
  return Lindbladian(p, space).apply(rho);
}

std::vector<NamedOperator> default_observables(const ModeOperators& ops) {
  return {{"aA", ops.a_a},
          {"aB", ops.a_b},
          {"nA", SpMat(SpMat(ops.a_a.adjoint()) * ops.a_a)},
          {"nB", SpMat(SpMat(ops.a_b.adjoint()) * ops.a_b)}};
}

ExpectationSeries integrate_master(const DensityOperator& rho0, const DimerParams& p, const FockSpace& space,
                                   double t_final, double sample_interval,
                                   const std::vector<NamedOperator>& observables, const MasterOptions& opt) {
  const Lindbladian gen(p, space);
  return integrate_master(rho0, gen, t_final, sample_interval,
                          observables.empty() ? default_observables(gen.operators()) : observables, opt);
}

ExpectationSeries integrate_master(const DensityOperator& rho0, const Lindbladian& gen, double t_final,
                                   double sample_interval, const std::vector<NamedOperator>& observables,
                                   const MasterOptions& opt) {
  const int d = gen.space().dim();
  if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("density operator does not match the Fock space");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  const auto obs = observables.empty() ? default_observables(gen.operators()) : observables;
  const auto grid = uniform_grid(0.0, t_final, sample_interval);

  ExpectationSeries out;
  out.times = grid;
  for (const auto& o : obs) out.names.push_back(o.name);
  out.values.assign(obs.size(), std::vector<cplx>());
  for (auto& v : out.values) v.reserve(grid.size());
  out.min_eigenvalue = std::numeric_limits<double>::infinity();

  auto rhs = [&gen](double, const DensityOperator& r, DensityOperator& dr) { gen.apply(r, dr); };
  auto solver = ode::make_dopri5<DensityOperator>(rhs, rho0, 0.0, {opt.rel_tol, opt.abs_tol});
  solver.integrate_sampled(grid.back(), grid, [&](double, const DensityOperator& r) {
    for (std::size_t k = 0; k < obs.size(); ++k) out.values[k].push_back(expectation(obs[k].op, r));
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(r.trace() - rho0.trace()));
    out.max_hermiticity_error = std::max(out.max_hermiticity_error, (r - r.adjoint()).cwiseAbs().maxCoeff());
    if (opt.check_positivity) {
      const double m = diagnose(r).min_eigenvalue;
      out.min_eigenvalue = std::min(out.min_eigenvalue, m);
      if (m < -opt.positivity_tolerance) out.positivity_violated = true;
    }
  });
  out.final_state = solver.y();
  return out;
}

DensityOperator propagate(const DensityOperator& rho0, const Lindbladian& gen, double t, const MasterOptions& opt) {
  if (t == 0.0) return rho0;
  auto rhs = [&gen](double, const DensityOperator& r, DensityOperator& dr) { gen.apply(r, dr); };
  auto solver = ode::make_dopri5<DensityOperator>(rhs, rho0, 0.0, {opt.rel_tol, opt.abs_tol});
  solver.integrate_to(t);
  return solver.y();
}

}  // namespace bhd::fock
