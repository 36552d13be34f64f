// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/semiclassical/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "bhdimer/core/dopri5.hpp"
#include "bhdimer/core/parallel.hpp"
#include "bhdimer/core/random.hpp"
#include "bhdimer/semiclassical/mean_field.hpp"

namespace bhd::semiclassical {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

struct IcRun {
  Trajectory traj;
  bool ok = true;
  double fail_time = 0.0;
  std::string message;
};

IcRun run_ic(const DimerParams& p, int index, const SweepOptions& opt) {
  IcRun r;
  IntegrateOptions io;
  io.rel_tol = opt.rel_tol;
  io.abs_tol = opt.abs_tol;
  io.sample_interval = opt.sample_interval;
  io.sample_from = opt.t_transient;
  try {
    r.traj = integrate(initial_condition(opt.seed, index, opt.ic_max_amplitude), p,
                       opt.t_transient + opt.t_sample, io);
  } catch (const ode::StepUnderflow& e) {
    r.ok = false;
    r.fail_time = e.time();
    r.message = e.what();
  }
  return r;
}

void check(const SweepOptions& opt) {
  if (opt.n_ic < 1) throw std::invalid_argument("n_ic must be >= 1");
  if (!(opt.t_transient >= 0.0) || !(opt.t_sample > 0.0))
    throw std::invalid_argument("transient must be >= 0 and sampling window > 0");
}

}  // namespace

ModeState random_initial_condition(std::mt19937_64& rng, double max_amplitude) {
  const double r1 = max_amplitude * NormalSource::uniform_open(rng);
  const double p1 = kTwoPi * NormalSource::uniform_open(rng);
  const double r2 = max_amplitude * NormalSource::uniform_open(rng);
  const double p2 = kTwoPi * NormalSource::uniform_open(rng);
  return from_site_basis(std::polar(r1, p1), std::polar(r2, p2));
}

ModeState initial_condition(std::uint64_t seed, int index, double max_amplitude) {
  auto rng = substream(seed, static_cast<std::uint64_t>(index));
  return random_initial_condition(rng, max_amplitude);
}

SweepResult order_parameter_sweep(const DimerParams& p, const std::vector<double>& f_grid,
                                  const SweepOptions& opt) {
  check(opt);
  p.validate();
  const std::size_t n_ic = static_cast<std::size_t>(opt.n_ic);
  std::vector<IcRun> runs(f_grid.size() * n_ic);
  parallel_for(runs.size(), opt.threads, [&](std::size_t task) {
    DimerParams q = p;
    q.f_tilde = f_grid[task / n_ic];
    IcRun r = run_ic(q, static_cast<int>(task % n_ic), opt);
    runs[task] = std::move(r);
  });
  SweepResult out;
  for (std::size_t task = 0; task < runs.size(); ++task) {
    const double f = f_grid[task / n_ic];
    const int ic = static_cast<int>(task % n_ic);
    const IcRun& r = runs[task];
    if (!r.ok) {
      out.failures.push_back({f, ic, r.fail_time, r.message});
      continue;
    }
    for (std::size_t k = 0; k < r.traj.times.size(); ++k) {
      const ModeState& s = r.traj.states[k];
      out.samples.push_back({f, ic, r.traj.times[k], std::abs(s.alpha_b), std::abs(s.alpha_a)});
    }
  }
  return out;
}

PhasePortrait phase_portrait(const DimerParams& p, const SweepOptions& opt) {
  check(opt);
  p.validate();
  std::vector<IcRun> runs(static_cast<std::size_t>(opt.n_ic));
  parallel_for(runs.size(), opt.threads, [&](std::size_t i) { runs[i] = run_ic(p, static_cast<int>(i), opt); });
  PhasePortrait out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const IcRun& r = runs[i];
    if (!r.ok) {
      out.failures.push_back({p.f_tilde, static_cast<int>(i), r.fail_time, r.message});
      continue;
    }
    for (std::size_t k = 0; k < r.traj.times.size(); ++k)
      out.points.push_back({static_cast<int>(i), r.traj.times[k], r.traj.states[k]});
  }
  return out;
}

}  // namespace bhd::semiclassical
