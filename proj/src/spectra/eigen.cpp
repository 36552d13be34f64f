// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/spectra/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace bhd::spectra {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using ApplyFn = std::function<void(const Vec&, Vec&)>;

double residual_of(const SpMat& b, cplx lambda, const Vec& x) {
  return (b * x - lambda * x).norm() / x.norm();
}

Vec random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v.normalized();
}

// Swap adjacent diagonal entries i, i+1 of an upper-triangular T, updating Q.
void swap_schur(Mat& t, Mat& q, Eigen::Index i) {
  const cplx a = t(i, i), c = t(i + 1, i + 1), b = t(i, i + 1);
  cplx x0 = b, x1 = c - a;
  const double nrm = std::hypot(std::abs(x0), std::abs(x1));
  if (nrm == 0.0) return;
  x0 /= nrm;
  x1 /= nrm;
  Eigen::Matrix2cd g;
  g << x0, -std::conj(x1), x1, std::conj(x0);
  t.middleRows(i, 2) = g.adjoint() * t.middleRows(i, 2);
  t.middleCols(i, 2) = t.middleCols(i, 2) * g;
  q.middleCols(i, 2) = q.middleCols(i, 2) * g;
  t(i + 1, i) = 0.0;
}

struct KrylovOutcome {
  std::vector<EigenPair> pairs;
  int restarts = 0;
  std::int64_t applications = 0;
};

// Krylov-Schur iteration for the k transformed eigenvalues of largest modulus.
// `verify` maps a Ritz pair back to the original problem or rejects it.
KrylovOutcome krylov_schur(Eigen::Index n, const ApplyFn& op, int k, const EigenOptions& opt,
                           const std::function<EigenPair(const Vec&)>& verify) {
  const int m = std::min<Eigen::Index>(opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * k + 16, 32), n - 1);
  if (k >= m) throw std::invalid_argument("requested eigenvalue count too large for the Krylov dimension");
  std::mt19937_64 rng(opt.seed);
  Mat v(n, m + 1);
  Mat h = Mat::Zero(m + 1, m);
  if (opt.start.size() == n && opt.start.norm() > 0.0)
    v.col(0) = (opt.start.normalized() + 1e-3 * random_vector(n, rng)).normalized();
  else
    v.col(0) = random_vector(n, rng);

  KrylovOutcome out;
  Vec w(n), proj;
  int p = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    for (int j = p; j < m; ++j) {
      op(v.col(j), w);
      ++out.applications;
      const double wnorm = w.norm();
      proj = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * proj;
      Vec corr = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * corr;
      proj += corr;
      h.block(0, j, j + 1, 1) = proj;
      double beta = w.norm();
      if (beta <= 1e-13 * wnorm) {
        // invariant subspace: continue with a fresh orthogonal direction
        for (int attempt = 0; attempt < 3; ++attempt) {
          w = random_vector(n, rng);
          w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
          w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
          if (w.norm() > 1e-8) break;
        }
        v.col(j + 1) = w.normalized();
        h(j + 1, j) = 0.0;
      } else {
        v.col(j + 1) = w / beta;
        h(j + 1, j) = beta;
      }
    }

    Eigen::ComplexSchur<Mat> schur(h.topRows(m));
    Mat t = schur.matrixT();
    Mat q = schur.matrixU();
    for (int i = 0; i < m; ++i) {
      int best = i;
      for (int l = i + 1; l < m; ++l)
        if (std::abs(t(l, l)) > std::abs(t(best, best))) best = l;
      for (int l = best; l > i; --l) swap_schur(t, q, l - 1);
    }
    const Eigen::RowVectorXcd bvec = h(m, m - 1) * q.row(m - 1);
    const double scale = std::abs(t(0, 0));

    std::vector<EigenPair> accepted;
    worst = 0.0;
    bool all = true;
    for (int i = 0; i < k; ++i) {
      Vec y = Vec::Zero(m);
      y(i) = 1.0;
      for (int l = i - 1; l >= 0; --l) {
        cplx s = 0.0;
        for (int c = l + 1; c <= i; ++c) s += t(l, c) * y(c);
        cplx den = t(l, l) - t(i, i);
        if (std::abs(den) < 1e-14 * scale) den = 1e-14 * scale;
        y(l) = -s / den;
      }
      const double ritz_res = std::abs((bvec * y).value()) / y.norm();
      if (ritz_res > opt.ritz_tol * scale) {
        all = false;
        worst = std::max(worst, ritz_res / std::max(scale, 1e-300));
        break;
      }
      const Vec x = (v.leftCols(m) * (q * y)).normalized();
      EigenPair pair = verify(x);
      if (!(pair.residual < opt.residual_tol * std::max(1.0, std::abs(pair.value)))) {
        all = false;
        worst = std::max(worst, pair.residual);
        break;
      }
      accepted.push_back(std::move(pair));
    }
    out.restarts = restart;
    if (all) {
      out.pairs = std::move(accepted);
      return out;
    }

    p = k + (m - k) / 2;
    const Mat kept = v.leftCols(m) * q.leftCols(p);
    v.col(p) = v.col(m);
    v.leftCols(p) = kept;
    h.setZero();
    h.topLeftCorner(p, p) = t.topLeftCorner(p, p);
    h.row(p).head(p) = bvec.head(p);
  }
  std::ostringstream os;
  os << "Krylov-Schur did not converge after " << opt.max_restarts << " restarts";
  throw EigenSolveError(os.str(), worst);
}

}  // namespace

std::string to_string(Transform t) {
  switch (t) {
    case Transform::Auto: return "auto";
    case Transform::Propagator: return "propagator";
    case Transform::ShiftInvert: return "shift-invert";
    case Transform::Dense: return "dense";
  }
  return "auto";
}

Transform transform_from_string(const std::string& s) {
  if (s == "auto") return Transform::Auto;
  if (s == "propagator") return Transform::Propagator;
  if (s == "shift-invert") return Transform::ShiftInvert;
  if (s == "dense") return Transform::Dense;
  throw std::invalid_argument("unknown eigen transform: " + s);
}

double target_distance(cplx lambda, Target t) {
  return t == Target::SmallestAbsReal ? std::abs(lambda.real()) : std::abs(lambda);
}

EigenResult leading_eigenvalues(const SpMat& b, int k, const EigenOptions& opt, bool with_left) {
  const Eigen::Index n = b.rows();
  if (b.cols() != n) throw std::invalid_argument("eigenvalue problem needs a square matrix");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k > n) throw std::invalid_argument("k exceeds the matrix dimension");

  auto order = [&](std::vector<EigenPair>& pairs) {
    std::stable_sort(pairs.begin(), pairs.end(), [&](const EigenPair& x, const EigenPair& y) {
      const double dx = target_distance(x.value, opt.target), dy = target_distance(y.value, opt.target);
      if (dx != dy) return dx < dy;
      return x.value.imag() > y.value.imag();
    });
  };

  Transform tr = opt.transform;
  if (tr == Transform::Auto || n <= 2 * k + 4) {
    if (n <= opt.dense_threshold || n <= 2 * k + 4)
      tr = Transform::Dense;
    else if (tr == Transform::Auto)
      tr = opt.target == Target::SmallestAbsReal ? Transform::Propagator : Transform::ShiftInvert;
  }

  EigenResult res;
  res.used = tr;
  if (tr == Transform::Dense) {
    const Mat dense = Mat(b);
    Eigen::ComplexEigenSolver<Mat> es(dense, true);
    if (es.info() != Eigen::Success) throw EigenSolveError("dense eigensolver failed", std::nan(""));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const auto& ev = es.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
      const double dx = target_distance(ev(x), opt.target), dy = target_distance(ev(y), opt.target);
      if (dx != dy) return dx < dy;
      return ev(x).imag() > ev(y).imag();
    });
    Mat rinv;
    if (with_left) rinv = es.eigenvectors().inverse();
    for (int j = 0; j < k; ++j) {
      const int c = idx[static_cast<std::size_t>(j)];
      EigenPair pr{ev(c), es.eigenvectors().col(c).normalized(), 0.0};
      pr.residual = residual_of(b, pr.value, pr.vector);
      if (!(pr.residual < opt.residual_tol * std::max(1.0, std::abs(pr.value)))) {
        std::ostringstream os;
        os << "dense eigenpair residual " << pr.residual << " above tolerance";
        throw EigenSolveError(os.str(), pr.residual);
      }
      res.pairs.push_back(std::move(pr));
      if (with_left) res.left.push_back(rinv.row(c).adjoint().normalized());
    }
    return res;
  }

  ApplyFn op;
  std::optional<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu;
  cplx center = 0.0;
  if (tr == Transform::Propagator) {
    center = b.diagonal().sum() / static_cast<double>(n);
    Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < b.outerSize(); ++c) {
      bool diag = false;
      for (SpMat::InnerIterator it(b, c); it; ++it) {
        cplx vv = it.value();
        if (it.row() == c) {
          vv -= center;
          diag = true;
        }
        colsum(c) += std::abs(vv);
      }
      if (!diag) colsum(c) += std::abs(center);
    }
    const double norm1 = colsum.maxCoeff();
    const int substeps = std::max(1, static_cast<int>(std::ceil(opt.tau * norm1 / opt.taylor_theta)));
    const double hstep = opt.tau / substeps;
    const double hnorm = hstep * norm1;
    const int degree = opt.taylor_degree;
    auto scaled = std::make_shared<Eigen::SparseMatrix<cplx, Eigen::RowMajor>>(b);
    for (Eigen::Index i = 0; i < n; ++i) scaled->coeffRef(i, i) -= center;
    *scaled *= hstep;
    scaled->makeCompressed();
    op = [scaled, substeps, hnorm, degree](const Vec& x, Vec& y) {
      Vec term, next;
      y = x;
      for (int s = 0; s < substeps; ++s) {
        term = y;
        for (int j = 1; j < 200; ++j) {
          next.noalias() = *scaled * term;
          term.swap(next);
          term *= 1.0 / j;
          y += term;
          if (degree > 0 ? j >= degree : (j > hnorm && term.norm() <= 1e-16 * y.norm())) break;
        }
      }
    };
  } else {
    lu.emplace();
    SpMat shifted = b;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opt.shift;
    shifted.makeCompressed();
    lu->compute(shifted);
    if (lu->info() != Eigen::Success) throw EigenSolveError("shift-invert factorization failed: " + lu->lastErrorMessage(), std::nan(""));
    op = [&lu](const Vec& x, Vec& y) { y = lu->solve(x); };
  }

  auto verify = [&b](const Vec& x) {
    const Vec bx = b * x;
    const cplx lambda = x.dot(bx) / x.squaredNorm();
    return EigenPair{lambda, x, (bx - lambda * x).norm() / x.norm()};
  };
  auto ko = krylov_schur(n, op, k, opt, verify);
  res.pairs = std::move(ko.pairs);
  res.restarts = ko.restarts;
  res.operator_applications = ko.applications;
  order(res.pairs);

  if (with_left) {
    EigenOptions lopt = opt;
    lopt.start = Vec();
    lopt.transform = tr;
    const SpMat badj = b.adjoint();
    const auto lres = leading_eigenvalues(badj, std::min<Eigen::Index>(k + 2, n - 1), lopt, false);
    for (const auto& pr : res.pairs) {
      double best = std::numeric_limits<double>::infinity();
      const Vec* match = nullptr;
      for (const auto& lp : lres.pairs) {
        const double d = std::abs(std::conj(lp.value) - pr.value);
        if (d < best) {
          best = d;
          match = &lp.vector;
        }
      }
      if (!match || best > 1e-6 * std::max(1.0, std::abs(pr.value)))
        throw EigenSolveError("no left eigenvector matches a computed eigenvalue", best);
      res.left.push_back(*match);
    }
  }
  return res;
}

}  // namespace bhd::spectra
