// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/fock/jumps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "bhdimer/core/grid.hpp"
#include "bhdimer/core/random.hpp"

namespace bhd::fock {

std::vector<JumpRecord> jump_trajectory(const StateVector& psi0, const Lindbladian& gen, const std::vector<double>& grid,
                                        std::uint64_t seed, std::uint64_t index,
                                        const std::vector<NamedOperator>& observables, const JumpOptions& opt,
                                        std::vector<cplx>& values) {
  const std::size_t n_obs = observables.size();
  const std::size_t width = n_obs + 2;
  values.assign(grid.size() * width, cplx{});
  std::vector<JumpRecord> jumps;

  auto rng = substream(seed, index);
  const SpMat& heff = gen.effective_hamiltonian();
  const SpMat& rate_op = gen.total_rate_operator();
  const auto& channels = gen.channels();
  auto rhs = [&heff](double, const StateVector& y, StateVector& dy) {
    dy.noalias() = heff * y;
    dy *= -kI;
  };

  StateVector psi = psi0.normalized();
  double threshold = NormalSource::uniform_open(rng);
  auto solver = ode::make_dopri5<StateVector>(rhs, psi, 0.0, {opt.rel_tol, opt.abs_tol});

  StateVector tmp, work;
  auto record = [&](std::size_t s, const StateVector& y) {
    const double n2 = y.squaredNorm();
    cplx* row = values.data() + s * width;
    for (std::size_t k = 0; k < n_obs; ++k) {
      work.noalias() = observables[k].op * y;
      row[k] = y.dot(work) / n2;
    }
    work.noalias() = rate_op * y;
    row[n_obs] = cplx(y.dot(work).real() / n2, 0.0);
    row[n_obs + 1] = cplx(static_cast<double>(jumps.size()), 0.0);
  };

  std::size_t next = 0;
  while (next < grid.size() && grid[next] <= 0.0) record(next++, psi);
  const double t_end = grid.back();
  std::vector<double> weights(channels.size());
  while (solver.t() < t_end) {
    solver.step(t_end);
    const bool jump = solver.y().squaredNorm() <= threshold;
    double t_jump = solver.t();
    if (jump) {
      double lo = solver.t_prev(), hi = solver.t();
      while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        solver.dense(mid, tmp);
        if (tmp.squaredNorm() > threshold)
          lo = mid;
        else
          hi = mid;
      }
      t_jump = hi;
    }
    while (next < grid.size() && grid[next] <= t_jump) {
      if (grid[next] == solver.t()) {
        record(next, solver.y());
      } else {
        solver.dense(grid[next], tmp);
        record(next, tmp);
      }
      ++next;
    }
    if (!jump) continue;

    if (t_jump == solver.t())
      tmp = solver.y();
    else
      solver.dense(t_jump, tmp);
    double total = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      work.noalias() = channels[k].op * tmp;
      weights[k] = channels[k].rate * work.squaredNorm();
      total += weights[k];
    }
    threshold = NormalSource::uniform_open(rng);
    const double pick = NormalSource::uniform_open(rng) * total;
    if (!(total > 0.0)) {
      solver.reset(t_jump, tmp.normalized());
      continue;
    }
    std::size_t chosen = 0;
    double acc = weights[0];
    while (chosen + 1 < channels.size() && pick > acc) acc += weights[++chosen];
    psi.noalias() = channels[chosen].op * tmp;
    psi.normalize();
    jumps.push_back({t_jump, static_cast<int>(chosen)});
    solver.reset(t_jump, psi);
  }
  return jumps;
}

JumpEnsembleResult quantum_jump_ensemble(const StateVector& psi0, const DimerParams& p, const FockSpace& space,
                                         double t_final, std::int64_t n_traj, std::uint64_t seed,
                                         const std::vector<NamedOperator>& observables, const JumpOptions& opt) {
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (psi0.size() != space.dim()) throw std::invalid_argument("state vector does not match the Fock space");
  const Lindbladian gen(p, space);
  const auto obs = observables.empty() ? default_observables(gen.operators()) : observables;
  const auto grid = uniform_grid(0.0, t_final, opt.sample_interval);

  JumpEnsembleResult out;
  out.times = grid;
  for (const auto& o : obs) out.names.push_back(o.name);
  out.names.emplace_back("jump_rate");
  out.names.emplace_back("jump_count");
  std::atomic<std::int64_t> total{0};
  out.stats = run_ensemble(n_traj, grid.size(), obs.size() + 2, opt.threads,
                           [&](std::int64_t i, std::vector<cplx>& buf) {
                             const auto rec = jump_trajectory(psi0, gen, grid, seed, static_cast<std::uint64_t>(i),
                                                              obs, opt, buf);
                             total += static_cast<std::int64_t>(rec.size());
                             return true;
                           });
  out.total_jumps = total.load();
  return out;
}

}  // namespace bhd::fock
