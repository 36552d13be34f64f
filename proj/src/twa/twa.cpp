// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/twa/twa.hpp"

#include <cmath>
#include <stdexcept>

#include "bhdimer/core/grid.hpp"

namespace bhd::twa {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

std::string to_string(NoiseModel m) { return m == NoiseModel::Collective ? "collective" : "independent"; }

NoiseModel noise_model_from_string(const std::string& s) {
  if (s == "independent") return NoiseModel::Independent;
  if (s == "collective") return NoiseModel::Collective;
  throw std::invalid_argument("unknown TWA noise model: " + s);
}

PhasePoint twa_drift(const PhasePoint& pt, const DimerParams& p) {
  const auto [f, u] = bare_params(p);
  const cplx a1 = pt.alpha1, a2 = pt.alpha2;
  const double loss = 0.5 * (p.gamma + p.kappa);
  const cplx hop(-0.5 * p.gamma, p.j_coupling);
  const cplx d1 = cplx(-loss, p.delta - 2.0 * u * (std::norm(a1) - 1.0)) * a1 + hop * a2 - kI * f;
  const cplx d2 = cplx(-loss, p.delta - 2.0 * u * (std::norm(a2) - 1.0)) * a2 + hop * a1 + kI * f;
  return {d1, d2};
}

PhasePoint sample_wigner_coherent(cplx alpha1, cplx alpha2, std::mt19937_64& rng, NormalSource& normal) {
  const double x1 = normal(rng), y1 = normal(rng), x2 = normal(rng), y2 = normal(rng);
  return {alpha1 + 0.5 * cplx(x1, y1), alpha2 + 0.5 * cplx(x2, y2)};
}

TwaSeries twa_ensemble(cplx alpha1_0, cplx alpha2_0, const DimerParams& p, double t_final, std::int64_t n_traj,
                       std::uint64_t seed, const TwaOptions& opt) {
  p.validate();
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const double ratio = opt.sample_interval / opt.dt;
  const auto steps_per_sample = static_cast<std::int64_t>(std::llround(ratio));
  if (steps_per_sample < 1 || std::abs(ratio - static_cast<double>(steps_per_sample)) > 1e-9 * ratio)
    throw std::invalid_argument("sample_interval must be an integer multiple of dt");
  const auto grid = uniform_grid(0.0, t_final, opt.sample_interval);

  TwaSeries out;
  out.times = grid;
  out.names = {"a1", "a2", "aA", "aB", "n1", "n2", "nA", "nB"};
  const std::size_t width = out.names.size();
  const double dt = opt.dt;
  const double sq_dt = std::sqrt(dt);
  const double g_shared = std::sqrt(0.5 * p.gamma) * kInvSqrt2 * sq_dt;
  const double g_local = std::sqrt(0.5 * p.kappa) * kInvSqrt2 * sq_dt;
  const bool collective = opt.noise == NoiseModel::Collective;

  out.stats = run_ensemble(n_traj, grid.size(), width, opt.threads, [&](std::int64_t i, std::vector<cplx>& buf) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    NormalSource normal;
    PhasePoint y = sample_wigner_coherent(alpha1_0, alpha2_0, rng, normal);
    auto record = [&](std::size_t s) {
      cplx* row = buf.data() + s * width;
      const cplx aa = kInvSqrt2 * (y.alpha1 - y.alpha2), ab = kInvSqrt2 * (y.alpha1 + y.alpha2);
      row[0] = y.alpha1;
      row[1] = y.alpha2;
      row[2] = aa;
      row[3] = ab;
      row[4] = std::norm(y.alpha1) - 0.5;
      row[5] = std::norm(y.alpha2) - 0.5;
      row[6] = std::norm(aa) - 0.5;
      row[7] = std::norm(ab) - 0.5;
    };
    record(0);
    for (std::size_t s = 1; s < grid.size(); ++s) {
      for (std::int64_t k = 0; k < steps_per_sample; ++k) {
        cplx w1, w2;
        if (p.gamma > 0.0) {
          const cplx z1(normal(rng), normal(rng));
          if (collective) {
            w1 = w2 = g_shared * z1;
          } else {
            const cplx z2(normal(rng), normal(rng));
            w1 = g_shared * z1;
            w2 = g_shared * z2;
          }
        }
        if (p.kappa > 0.0) {
          w1 += g_local * cplx(normal(rng), normal(rng));
          w2 += g_local * cplx(normal(rng), normal(rng));
        }
        const PhasePoint f0 = twa_drift(y, p);
        const PhasePoint pred{y.alpha1 + f0.alpha1 * dt + w1, y.alpha2 + f0.alpha2 * dt + w2};
        const PhasePoint f1 = twa_drift(pred, p);
        y.alpha1 += 0.5 * dt * (f0.alpha1 + f1.alpha1) + w1;
        y.alpha2 += 0.5 * dt * (f0.alpha2 + f1.alpha2) + w2;
        if (!y.finite(opt.divergence_threshold)) return false;
      }
      record(s);
    }
    return true;
  });
  out.n_diverged = out.stats.n_rejected;
  return out;
}

}  // namespace bhd::twa
