// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bhdimer/core/parallel.hpp"
#include "bhdimer/core/params.hpp"

namespace bhd {

/// Ensemble mean and standard error of complex observables on a time grid.
/// Layout of every array is [sample][observable].
struct EnsembleStats {
  std::size_t n_samples = 0;
  std::size_t n_observables = 0;
  std::int64_t n_used = 0;
  std::int64_t n_rejected = 0;
  std::vector<cplx> mean;
  std::vector<double> stderr_re;
  std::vector<double> stderr_im;

  cplx mean_at(std::size_t sample, std::size_t obs) const { return mean[sample * n_observables + obs]; }
  double stderr_re_at(std::size_t sample, std::size_t obs) const {
    return stderr_re[sample * n_observables + obs];
  }
  double stderr_im_at(std::size_t sample, std::size_t obs) const {
    return stderr_im[sample * n_observables + obs];
  }
};

namespace detail {

struct Moments {
  std::vector<double> s_re, s_im, q_re, q_im;
  std::int64_t used = 0, rejected = 0;

  explicit Moments(std::size_t n = 0) : s_re(n, 0.0), s_im(n, 0.0), q_re(n, 0.0), q_im(n, 0.0) {}

  void add(const std::vector<cplx>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double re = v[i].real(), im = v[i].imag();
      s_re[i] += re;
      s_im[i] += im;
      q_re[i] += re * re;
      q_im[i] += im * im;
    }
    ++used;
  }

  void merge(const Moments& o) {
    for (std::size_t i = 0; i < s_re.size(); ++i) {
      s_re[i] += o.s_re[i];
      s_im[i] += o.s_im[i];
      q_re[i] += o.q_re[i];
      q_im[i] += o.q_im[i];
    }
    used += o.used;
    rejected += o.rejected;
  }
};

inline double standard_error(double s, double q, double n) {
  if (n < 2) return 0.0;
  const double var = std::max(0.0, (q - s * s / n) / (n - 1.0));
  return std::sqrt(var / n);
}

}  // namespace detail

/// Runs `n_traj` independent tasks. `task(index, out)` fills `out` with
/// n_samples * n_observables values and returns false to reject the task.
/// Tasks are reduced in fixed chunks of 64 in index order, so the result does
/// not depend on the thread count or scheduling.
template <class Task>
EnsembleStats run_ensemble(std::int64_t n_traj, std::size_t n_samples, std::size_t n_observables,
                           unsigned threads, Task&& task) {
  constexpr std::int64_t kChunk = 64;
  const std::size_t len = n_samples * n_observables;
  const std::int64_t n_chunks = (n_traj + kChunk - 1) / kChunk;
  std::vector<detail::Moments> chunks(static_cast<std::size_t>(n_chunks));
  parallel_for(static_cast<std::size_t>(n_chunks), threads, [&](std::size_t c) {
    detail::Moments m(len);
    std::vector<cplx> buf(len);
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(n_traj, lo + kChunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      std::fill(buf.begin(), buf.end(), cplx{});
      if (task(i, buf))
        m.add(buf);
      else
        ++m.rejected;
    }
    chunks[c] = std::move(m);
  });
  detail::Moments total(len);
  for (const auto& c : chunks) total.merge(c);

  EnsembleStats st;
  st.n_samples = n_samples;
  st.n_observables = n_observables;
  st.n_used = total.used;
  st.n_rejected = total.rejected;
  st.mean.resize(len);
  st.stderr_re.resize(len);
  st.stderr_im.resize(len);
  const double n = static_cast<double>(total.used);
  for (std::size_t i = 0; i < len; ++i) {
    st.mean[i] = n > 0 ? cplx(total.s_re[i] / n, total.s_im[i] / n) : cplx{};
    st.stderr_re[i] = detail::standard_error(total.s_re[i], total.q_re[i], n);
    st.stderr_im[i] = detail::standard_error(total.s_im[i], total.q_im[i], n);
  }
  return st;
}

}  // namespace bhd
