// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/semiclassical/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bhdimer/core/grid.hpp"
#include "bhdimer/core/random.hpp"

namespace bhd::semiclassical {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTwoPi = 6.283185307179586476925;

using Vec2 = Eigen::Vector2cd;

Vec2 pack(const ModeState& s) { return Vec2(s.alpha_b, s.alpha_a); }
ModeState unpack(const Vec2& v) { return {v(0), v(1)}; }

auto flow(const DimerParams& p) {
  return [p](double, const Vec2& y, Vec2& dy) {
    const ModeState d = mean_field_rhs(unpack(y), p);
    dy(0) = d.alpha_b;
    dy(1) = d.alpha_a;
  };
}

void require_regime(const DimerParams& p) {
  if (!(p.j_coupling - p.delta > 0.0))
    throw std::invalid_argument("symmetric fixed point requires j_coupling - delta > 0");
}

cplx branch_sqrt(double r) { return r >= 0.0 ? cplx(std::sqrt(r), 0.0) : cplx(0.0, std::sqrt(-r)); }

// Real 4-vector (Re b, Im b, Re a, Im a) form of the stationarity system.
Eigen::Vector4d residual(const Eigen::Vector4d& v, const DimerParams& p) {
  const ModeState d = mean_field_rhs({cplx(v(0), v(1)), cplx(v(2), v(3))}, p);
  return {d.alpha_b.real(), d.alpha_b.imag(), d.alpha_a.real(), d.alpha_a.imag()};
}

Eigen::Matrix4d real_jacobian(const Eigen::Vector4d& v, const DimerParams& p) {
  const Eigen::Matrix4cd m = general_jacobian({cplx(v(0), v(1)), cplx(v(2), v(3))}, p);
  Eigen::Matrix4d r;
  for (int f = 0; f < 2; ++f) {
    const int row = 2 * f;
    for (int z = 0; z < 2; ++z) {
      const cplx dz = m(row, 2 * z);
      const cplx dzc = m(row, 2 * z + 1);
      const cplx dx = dz + dzc;
      const cplx dy = kI * (dz - dzc);
      r(row, 2 * z) = dx.real();
      r(row + 1, 2 * z) = dx.imag();
      r(row, 2 * z + 1) = dy.real();
      r(row + 1, 2 * z + 1) = dy.imag();
    }
  }
  return r;
}

Eigen::Vector4d to_real(const ModeState& s) {
  return {s.alpha_b.real(), s.alpha_b.imag(), s.alpha_a.real(), s.alpha_a.imag()};
}

double distance(const ModeState& x, const ModeState& y) {
  return std::sqrt(std::norm(x.alpha_b - y.alpha_b) + std::norm(x.alpha_a - y.alpha_a));
}

FixedPoint make_fixed_point(const ModeState& s, const DimerParams& p, double sym_tol) {
  FixedPoint fp;
  fp.state = s;
  fp.jacobian_eigenvalues = jacobian_eigenvalues(s, p);
  fp.stability = classify(fp.jacobian_eigenvalues, p.gamma);
  fp.symmetry_breaking = std::abs(s.alpha_b) > sym_tol;
  return fp;
}

double max_real(const std::array<cplx, 4>& ev) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& e : ev) m = std::max(m, e.real());
  return m;
}

}  // namespace

ModeState mean_field_rhs(const ModeState& s, const DimerParams& p) {
  const cplx b = s.alpha_b, a = s.alpha_a;
  const double nb = std::norm(b), na = std::norm(a);
  const double u = p.u_tilde;
  const cplx lin_b(-p.delta - p.j_coupling, -p.gamma);
  const double lin_a = -p.delta + p.j_coupling;
  const cplx in_b = lin_b * b + u * (nb * b + a * a * std::conj(b) + 2.0 * na * b);
  const cplx in_a = lin_a * a + u * (na * a + b * b * std::conj(a) + 2.0 * nb * a) + kSqrt2 * p.f_tilde;
  return {-kI * in_b - 0.5 * p.kappa * b, -kI * in_a - 0.5 * p.kappa * a};
}

Trajectory integrate(const ModeState& s0, const DimerParams& p, double t_final, const IntegrateOptions& opt) {
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (!(opt.rel_tol > 0.0 && opt.rel_tol <= 1e-3)) throw std::invalid_argument("rel_tol must lie in (0, 1e-3]");
  if (!(opt.sample_from >= 0.0 && opt.sample_from <= t_final))
    throw std::invalid_argument("sample_from must lie in [0, t_final]");
  const auto grid = uniform_grid(opt.sample_from, t_final, opt.sample_interval);
  Trajectory tr;
  tr.sample_interval = opt.sample_interval;
  tr.times.reserve(grid.size());
  tr.states.reserve(grid.size());
  auto solver = ode::make_dopri5<Vec2>(flow(p), pack(s0), 0.0, {opt.rel_tol, opt.abs_tol});
  solver.integrate_sampled(grid.back(), grid, [&](double t, const Vec2& y) {
    tr.times.push_back(t);
    tr.states.push_back(unpack(y));
  });
  return tr;
}

ModeState evolve(const ModeState& s0, const DimerParams& p, double t_final, double rel_tol, double abs_tol) {
  auto solver = ode::make_dopri5<Vec2>(flow(p), pack(s0), 0.0, {rel_tol, abs_tol});
  solver.integrate_to(t_final);
  return unpack(solver.y());
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Attractive:
      return "attractive";
    case Stability::StableNonAttractive:
      return "stable_non_attractive";
    case Stability::Repulsive:
      return "repulsive";
  }
  return "unknown";
}

Stability classify(const std::array<cplx, 4>& eigenvalues, double gamma) {
  const double tol = kZeroRealPart * gamma;
  bool marginal = false;
  for (const auto& e : eigenvalues) {
    if (e.real() > tol) return Stability::Repulsive;
    if (std::abs(e.real()) <= tol) marginal = true;
  }
  return marginal ? Stability::StableNonAttractive : Stability::Attractive;
}

double symmetric_fixed_point_amplitude(const DimerParams& p) {
  require_regime(p);
  const double c1 = p.j_coupling - p.delta;
  const double c0 = kSqrt2 * p.f_tilde;
  const double u = p.u_tilde;
  if (u == 0.0) return -c0 / c1;
  const double pp = c1 / u, q = c0 / u;
  const double disc = std::sqrt(0.25 * q * q + pp * pp * pp / 27.0);
  double x = std::cbrt(-0.5 * q + disc) + std::cbrt(-0.5 * q - disc);
  for (int it = 0; it < 8; ++it) {
    const double g = (u * x * x + c1) * x + c0;
    const double dg = 3.0 * u * x * x + c1;
    const double dx = g / dg;
    x -= dx;
    if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::array<cplx, 4> symmetric_fp_eigenvalues(const DimerParams& p) {
  const double x = symmetric_fixed_point_amplitude(p);
  const double ux2 = p.u_tilde * x * x;
  const double rb = ux2 * ux2 - (2.0 * ux2 - p.delta - p.j_coupling) * (2.0 * ux2 - p.delta - p.j_coupling);
  const double ra = ux2 * ux2 - (p.j_coupling - p.delta + 2.0 * ux2) * (p.j_coupling - p.delta + 2.0 * ux2);
  const cplx sb = branch_sqrt(rb), sa = branch_sqrt(ra);
  const double base_b = -p.gamma - 0.5 * p.kappa;
  const double base_a = -0.5 * p.kappa;
  return {base_b + sb, base_b - sb, base_a + sa, base_a - sa};
}

FixedPoint fixed_point_symmetric(const DimerParams& p) {
  FixedPoint fp;
  fp.state = {0.0, symmetric_fixed_point_amplitude(p)};
  fp.jacobian_eigenvalues = symmetric_fp_eigenvalues(p);
  fp.stability = classify(fp.jacobian_eigenvalues, p.gamma);
  fp.symmetry_breaking = false;
  return fp;
}

Eigen::Matrix4cd general_jacobian(const ModeState& s, const DimerParams& p) {
  const cplx b = s.alpha_b, a = s.alpha_a;
  const double u = p.u_tilde;
  const double nb = std::norm(b), na = std::norm(a);
  const double hk = 0.5 * p.kappa;
  // Wirtinger derivatives of f_B and f_A.
  const cplx fb_b = -kI * (cplx(-p.delta - p.j_coupling, -p.gamma) + u * (2.0 * nb + 2.0 * na)) - hk;
  const cplx fb_bc = -kI * u * (b * b + a * a);
  const cplx fb_a = -kI * u * 2.0 * (a * std::conj(b) + std::conj(a) * b);
  const cplx fb_ac = -kI * u * 2.0 * a * b;
  const cplx fa_a = -kI * ((-p.delta + p.j_coupling) + u * (2.0 * na + 2.0 * nb)) - hk;
  const cplx fa_ac = -kI * u * (a * a + b * b);
  const cplx fa_b = -kI * u * 2.0 * (b * std::conj(a) + std::conj(b) * a);
  const cplx fa_bc = -kI * u * 2.0 * b * a;
  Eigen::Matrix4cd m;
  m << fb_b, fb_bc, fb_a, fb_ac,
       std::conj(fb_bc), std::conj(fb_b), std::conj(fb_ac), std::conj(fb_a),
       fa_b, fa_bc, fa_a, fa_ac,
       std::conj(fa_bc), std::conj(fa_b), std::conj(fa_ac), std::conj(fa_a);
  return m;
}

std::array<cplx, 4> jacobian_eigenvalues(const ModeState& s, const DimerParams& p) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(general_jacobian(s, p), false);
  std::array<cplx, 4> ev;
  for (int i = 0; i < 4; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return ev;
}

std::optional<ModeState> refine_fixed_point(const ModeState& guess, const DimerParams& p,
                                            double residual_tolerance, int max_iter) {
  Eigen::Vector4d v = to_real(guess);
  Eigen::Vector4d g = residual(v, p);
  double gn = g.norm();
  for (int it = 0; it < max_iter && std::isfinite(gn); ++it) {
    if (gn < 1e-3 * residual_tolerance) break;
    const Eigen::Matrix4d jac = real_jacobian(v, p);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Vector4d step = lu.solve(-g);
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::Vector4d trial = v + lambda * step;
      const Eigen::Vector4d gt = residual(trial, p);
      if (gt.norm() < gn) {
        v = trial;
        g = gt;
        gn = gt.norm();
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (!(gn < residual_tolerance)) return std::nullopt;
  return ModeState{cplx(v(0), v(1)), cplx(v(2), v(3))};
}

std::vector<FixedPoint> find_symmetry_breaking_fixed_points(const DimerParams& p, const RootSearchOptions& opt) {
  std::vector<ModeState> roots;
  auto add_root = [&](const ModeState& s) {
    for (const auto& r : roots)
      if (distance(r, s) < opt.dedup_distance) return;
    roots.push_back(s);
  };
  for (int i = 0; i < opt.n_starts; ++i) {
    auto rng = substream(opt.seed, static_cast<std::uint64_t>(i));
    const double rb = opt.box * NormalSource::uniform_open(rng);
    const double pb = kTwoPi * NormalSource::uniform_open(rng);
    const double ra = opt.box * NormalSource::uniform_open(rng);
    const double pa = kTwoPi * NormalSource::uniform_open(rng);
    const ModeState guess{std::polar(rb, pb), std::polar(ra, pa)};
    const auto root = refine_fixed_point(guess, p, opt.residual_tolerance);
    if (!root || !(std::abs(root->alpha_b) > opt.symmetry_tolerance)) continue;
    add_root(*root);
    if (const auto mirror = refine_fixed_point({-root->alpha_b, root->alpha_a}, p, opt.residual_tolerance))
      add_root(*mirror);
  }
  std::sort(roots.begin(), roots.end(), [](const ModeState& x, const ModeState& y) {
    if (x.alpha_a.real() != y.alpha_a.real()) return x.alpha_a.real() < y.alpha_a.real();
    if (x.alpha_a.imag() != y.alpha_a.imag()) return x.alpha_a.imag() < y.alpha_a.imag();
    if (x.alpha_b.real() != y.alpha_b.real()) return x.alpha_b.real() < y.alpha_b.real();
    return x.alpha_b.imag() < y.alpha_b.imag();
  });
  std::vector<FixedPoint> out;
  out.reserve(roots.size());
  for (const auto& r : roots) out.push_back(make_fixed_point(r, p, opt.symmetry_tolerance));
  return out;
}

std::optional<std::pair<double, double>> instability_window(const DimerParams& p, double f_max) {
  require_regime(p);
  auto growth = [&](double f) {
    DimerParams q = p;
    q.f_tilde = f;
    return symmetric_fp_eigenvalues(q)[0].real();
  };
  auto bisect = [&](double lo, double hi) {
    const bool lo_positive = growth(lo) > 0.0;
    while (hi - lo > 1e-6 * p.gamma) {
      const double mid = 0.5 * (lo + hi);
      if ((growth(mid) > 0.0) == lo_positive)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double step = 5e-3 * p.gamma;
  double prev_f = 0.0;
  bool prev_positive = growth(0.0) > 0.0;
  std::optional<double> lower;
  const int n = static_cast<int>(std::ceil(f_max / step));
  for (int i = 1; i <= n; ++i) {
    const double f = std::min(f_max, i * step);
    const bool positive = growth(f) > 0.0;
    if (positive != prev_positive) {
      const double edge = bisect(prev_f, f);
      if (!lower) {
        if (positive) lower = edge;
      } else {
        return std::make_pair(*lower, edge);
      }
    }
    prev_f = f;
    prev_positive = positive;
  }
  if (lower) return std::make_pair(*lower, f_max);
  return std::nullopt;
}

std::vector<double> symmetry_breaking_stability_boundaries(const DimerParams& p, double f_lo, double f_hi,
                                                           double step, const RootSearchOptions& opt) {
  struct Sample {
    double f;
    ModeState root;
    double growth;
  };
  auto at = [&](double f) -> std::optional<Sample> {
    DimerParams q = p;
    q.f_tilde = f;
    const auto fps = find_symmetry_breaking_fixed_points(q, opt);
    if (fps.empty()) return std::nullopt;
    const FixedPoint* best = &fps.front();
    for (const auto& fp : fps)
      if (max_real(fp.jacobian_eigenvalues) > max_real(best->jacobian_eigenvalues)) best = &fp;
    return Sample{f, best->state, max_real(best->jacobian_eigenvalues)};
  };
  auto growth_from = [&](double f, const ModeState& guess) -> std::optional<std::pair<double, ModeState>> {
    DimerParams q = p;
    q.f_tilde = f;
    const auto r = refine_fixed_point(guess, q, opt.residual_tolerance);
    if (!r || std::abs(r->alpha_b) <= opt.symmetry_tolerance) return std::nullopt;
    return std::make_pair(max_real(jacobian_eigenvalues(*r, q)), *r);
  };
  const double tol = kZeroRealPart * p.gamma;
  std::vector<double> edges;
  std::optional<Sample> prev;
  for (double f = f_lo; f <= f_hi + 1e-12; f += step) {
    auto cur = at(f);
    if (cur && prev) {
      const bool a_prev = prev->growth < -tol, a_cur = cur->growth < -tol;
      if (a_prev != a_cur) {
        double lo = prev->f, hi = cur->f;
        ModeState guess = prev->root;
        while (hi - lo > 1e-6 * p.gamma) {
          const double mid = 0.5 * (lo + hi);
          const auto g = growth_from(mid, guess);
          if (!g) break;
          if ((g->first < -tol) == a_prev) {
            lo = mid;
            guess = g->second;
          } else {
            hi = mid;
          }
        }
        edges.push_back(0.5 * (lo + hi));
      }
    }
    prev = cur;
  }
  return edges;
}

cplx reduced_antibonding_rhs(cplx alpha_a, const DimerParams& p) {
  return -kI * ((-p.delta + p.j_coupling + p.u_tilde * std::norm(alpha_a)) * alpha_a + kSqrt2 * p.f_tilde);
}

double reduced_antibonding_energy(cplx alpha_a, const DimerParams& p) {
  const double n = std::norm(alpha_a);
  return (-p.delta + p.j_coupling) * n + 0.5 * p.u_tilde * n * n + 2.0 * kSqrt2 * p.f_tilde * alpha_a.real();
}

cplx reduced_bonding_rhs(cplx alpha_b, cplx alpha_a, const DimerParams& p) {
  const cplx lin(-p.delta - p.j_coupling, -p.gamma);
  const cplx in = lin * alpha_b + p.u_tilde * (alpha_a * alpha_a * std::conj(alpha_b) + 2.0 * std::norm(alpha_a) * alpha_b);
  return -kI * in - 0.5 * p.kappa * alpha_b;
}

double observe(const ModeState& s, Observable o) {
  switch (o) {
    case Observable::AbsA:
      return std::abs(s.alpha_a);
    case Observable::AbsB:
      return std::abs(s.alpha_b);
    case Observable::ReA:
      return s.alpha_a.real();
  }
  return 0.0;
}

std::optional<double> limit_cycle_period(const Trajectory& traj, Observable o) {
  std::vector<double> v(traj.states.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = observe(traj.states[i], o);
  return limit_cycle_period(traj.times, v);
}

std::optional<double> limit_cycle_period(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  const std::size_t n = values.size();
  if (n < 16) return std::nullopt;
  const std::size_t start = 2 * n / 3;
  const auto [mn, mx] = std::minmax_element(values.begin() + static_cast<std::ptrdiff_t>(start), values.end());
  if (*mx - *mn < 1e-6) return std::nullopt;
  std::vector<double> peaks;
  for (std::size_t i = std::max<std::size_t>(start, 1); i + 1 < n; ++i) {
    if (values[i] > values[i - 1] && values[i] >= values[i + 1]) {
      const double den = values[i - 1] - 2.0 * values[i] + values[i + 1];
      double shift = den != 0.0 ? 0.5 * (values[i - 1] - values[i + 1]) / den : 0.0;
      shift = std::clamp(shift, -0.5, 0.5);
      const double dt = 0.5 * (times[i + 1] - times[i - 1]);
      peaks.push_back(times[i] + shift * dt);
    }
  }
  if (peaks.size() < 3) return std::nullopt;
  std::vector<double> gaps(peaks.size() - 1);
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) gaps[i] = peaks[i + 1] - peaks[i];
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size());
  if (std::sqrt(var) > 0.01 * mean) return std::nullopt;
  return mean;
}

}  // namespace bhd::semiclassical
