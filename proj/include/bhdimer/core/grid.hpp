// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bhd {

/// Points t0, t0 + dt, ... up to and including t1 (with a 1e-9 relative slack).
inline std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
  if (t1 < t0) throw std::invalid_argument("grid end precedes its start");
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt * (1.0 + 1e-12) + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = t0 + static_cast<double>(i) * dt;
  return g;
}

}  // namespace bhd
