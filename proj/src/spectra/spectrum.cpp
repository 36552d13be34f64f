// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/spectra/spectrum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/SVD>

#include "bhdimer/core/parallel.hpp"

namespace bhd::spectra {

namespace {

void sort_modes(std::vector<Eigenmode>& modes) {
  std::stable_sort(modes.begin(), modes.end(), [](const Eigenmode& a, const Eigenmode& b) {
    const double da = std::abs(a.value.real()), db = std::abs(b.value.real());
    if (da != db) return da < db;
    return a.value.imag() > b.value.imag();
  });
}

cplx vec_trace(const Eigen::VectorXcd& v, int d) {
  cplx t = 0.0;
  for (int k = 0; k < d; ++k) t += v(static_cast<Eigen::Index>(k) * d + k);
  return t;
}

}  // namespace

const Eigenmode* SpectrumResult::steady() const {
  for (const auto& m : modes)
    if (std::abs(m.value) < kZeroEigenvalue) return &m;
  return nullptr;
}

SpectrumResult compute_spectrum(const DimerParams& p, const FockSpace& space, const SpectrumOptions& opt) {
  const auto l = build_liouvillian(p, space, opt.build);
  SpectrumResult out;
  out.dim = space.dim();
  auto add = [&](const EigenResult& er, int sector, const SectorMap* m) {
    for (std::size_t j = 0; j < er.pairs.size(); ++j) {
      Eigenmode mode;
      mode.value = er.pairs[j].value;
      mode.sector = sector;
      mode.residual = er.pairs[j].residual;
      mode.right = m ? lift(*m, sector, er.pairs[j].vector) : er.pairs[j].vector;
      if (!er.left.empty()) mode.left = m ? lift(*m, sector, er.left[j]) : er.left[j];
      if (std::abs(mode.value) < kZeroEigenvalue) {
        const cplx tr = vec_trace(mode.right, out.dim);
        if (std::abs(tr) > 1e-14) mode.right /= tr;
      }
      out.modes.push_back(std::move(mode));
    }
  };
  if (l.sectors) {
    const auto blocks = sector_decompose(l);
    if (opt.k_plus > 0) {
      const int k = std::min<int>(opt.k_plus, static_cast<int>(blocks.plus.rows()));
      add(leading_eigenvalues(blocks.plus, k, opt.eigen, opt.with_left), +1, &*l.sectors);
    }
    if (opt.k_minus > 0) {
      const int k = std::min<int>(opt.k_minus, static_cast<int>(blocks.minus.rows()));
      add(leading_eigenvalues(blocks.minus, k, opt.eigen, opt.with_left), -1, &*l.sectors);
    }
  } else {
    const int k = std::min<int>(opt.k_plus + opt.k_minus, static_cast<int>(l.matrix.rows()));
    add(leading_eigenvalues(l.matrix, k, opt.eigen, opt.with_left), 0, nullptr);
  }
  sort_modes(out.modes);
  return out;
}

std::vector<cplx> eigenmode_expansion(const Eigen::MatrixXcd& rho0, const SpectrumResult& spectrum) {
  const std::size_t k = spectrum.modes.size();
  if (k == 0) throw std::invalid_argument("spectrum holds no modes");
  for (const auto& m : spectrum.modes)
    if (m.left.size() != m.right.size()) throw std::invalid_argument("eigenmode expansion needs left eigenvectors");
  if (rho0.rows() != spectrum.dim || rho0.cols() != spectrum.dim)
    throw std::invalid_argument("density operator does not match the spectrum dimension");
  const Eigen::VectorXcd v = vectorize(rho0);
  const auto n = static_cast<Eigen::Index>(k);
  Eigen::MatrixXcd s(n, n);
  Eigen::VectorXcd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& wi = spectrum.modes[static_cast<std::size_t>(i)].left;
    g(i) = wi.dot(v);
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = wi.dot(spectrum.modes[static_cast<std::size_t>(j)].right);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(n - 1);
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << "biorthogonal overlap matrix is ill-conditioned (condition number " << cond << ")";
    throw IllConditionedExpansion(os.str(), cond);
  }
  const Eigen::VectorXcd c = s.fullPivLu().solve(g);
  return {c.data(), c.data() + c.size()};
}

Eigen::MatrixXcd reconstruct(const SpectrumResult& spectrum, const std::vector<cplx>& coeffs, double t) {
  if (coeffs.size() != spectrum.modes.size()) throw std::invalid_argument("coefficient count does not match the modes");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spectrum.dim) * spectrum.dim);
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    v += (coeffs[j] * std::exp(spectrum.modes[j].value * t)) * spectrum.modes[j].right;
  return unvectorize(v);
}

int spectral_cutoff(double n_scale) {
  if (!(n_scale > 0.0)) throw std::invalid_argument("n_scale must be > 0");
  return static_cast<int>(std::ceil(3.0 * n_scale - 1e-12)) + 3;
}

std::vector<GapPoint> gap_sweep(const DimerParams& base, const std::vector<double>& f_grid,
                                const std::vector<double>& n_values, const GapSweepOptions& opt) {
  const std::function<int(double)> cutoff = opt.cutoff ? opt.cutoff : std::function<int(double)>(spectral_cutoff);
  std::vector<GapPoint> out(n_values.size() * f_grid.size());
  std::mutex report;
  parallel_for(n_values.size(), opt.threads, [&](std::size_t in) {
    const double nn = n_values[in];
    const int nmax = cutoff(nn);
    const FockSpace space(nmax, nmax);
    Eigen::VectorXcd start_plus, start_minus;
    for (std::size_t jf = 0; jf < f_grid.size(); ++jf) {
      GapPoint& gp = out[in * f_grid.size() + jf];
      gp.n_scale = nn;
      gp.f_tilde = f_grid[jf];
      gp.nmax = nmax;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        DimerParams p = base;
        p.n_scale = nn;
        p.f_tilde = f_grid[jf];
        const auto l = build_liouvillian(p, space, opt.build);
        const auto blocks = sector_decompose(l);
        EigenOptions eo = opt.eigen;
        eo.target = Target::SmallestAbsReal;
        // k = 0 skips a sector
        const auto leading = [&](const SpMat& block, int k, const Eigen::VectorXcd& start) {
          if (k <= 0) return EigenResult{};
          eo.start = opt.warm_start ? start : Eigen::VectorXcd();
          return leading_eigenvalues(block, std::min<int>(k, static_cast<int>(block.rows())), eo);
        };
        const auto rp = leading(blocks.plus, opt.k_plus, start_plus);
        const auto rm = leading(blocks.minus, opt.k_minus, start_minus);
        start_plus = Eigen::VectorXcd::Zero(blocks.plus.rows());
        for (const auto& pr : rp.pairs) {
          gp.max_residual = std::max(gp.max_residual, pr.residual);
          start_plus += pr.vector;
          if (std::abs(pr.value) < kZeroEigenvalue) continue;
          if (std::abs(pr.value.imag()) < kRealEigenvalue) {
            if (!gp.l1p) gp.l1p = pr.value;
          } else if (!gp.l2p) {
            gp.l2p = pr.value.imag() > 0 ? pr.value : std::conj(pr.value);
          }
        }
        start_minus = Eigen::VectorXcd::Zero(blocks.minus.rows());
        for (const auto& pr : rm.pairs) {
          gp.max_residual = std::max(gp.max_residual, pr.residual);
          start_minus += pr.vector;
        }
        if (!rm.pairs.empty()) gp.l1m = rm.pairs.front().value;
        if (rp.pairs.empty()) start_plus = Eigen::VectorXcd();
        if (rm.pairs.empty()) start_minus = Eigen::VectorXcd();
      } catch (const std::exception& e) {
        gp.error = e.what();
        start_plus = Eigen::VectorXcd();
        start_minus = Eigen::VectorXcd();
      }
      gp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (opt.on_point) {
        std::lock_guard<std::mutex> lock(report);
        opt.on_point(gp);
      }
    }
  });
  return out;
}

ScalingFit scaling_fit(const std::vector<double>& n_values, const std::vector<double>& lambda_values) {
  if (n_values.size() != lambda_values.size()) throw std::invalid_argument("scaling fit needs matching lengths");
  if (n_values.size() < 3) throw std::invalid_argument("scaling fit needs at least 3 points");
  const std::size_t n = n_values.size();
  double sx = 0, sy = 0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(n_values[i] > 0.0) || !(lambda_values[i] > 0.0))
      throw std::invalid_argument("scaling fit needs positive values");
    x[i] = std::log(n_values[i]);
    y[i] = std::log(lambda_values[i]);
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("scaling fit needs distinct N values");
  ScalingFit f;
  f.beta = sxy / sxx;
  f.prefactor = std::exp(my - f.beta * mx);
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (my + f.beta * (x[i] - mx));
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

}  // namespace bhd::spectra
