// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bhdimer/fock/operators.hpp"

namespace bhd::spectra {

using fock::FockSpace;
using SpMat = Eigen::SparseMatrix<cplx>;
using SpMatRow = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Row-wise stacking: vec(rho)[i * d + j] = rho(i, j).
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v);

SpMat kron(const SpMat& a, const SpMat& b);

/// Matrix of rho -> left * rho * right under row-wise stacking: left (x) right^T.
SpMat superoperator(const SpMat& left, const SpMat& right);

/// Orbit of a basis dyad under the parity superoperator. For a pair,
/// P e_rep = sign * e_partner; for a singleton (partner < 0), P e_rep = sign * e_rep.
struct Orbit {
  int rep;
  int partner;
  int sign;
};

/// Orthonormal bases of the +1 and -1 eigenspaces of the parity superoperator.
/// Sector sigma holds every pair orbit, as (e_rep + sigma * sign * e_partner) / sqrt(2),
/// and every singleton whose sign equals sigma.
struct SectorMap {
  int full_dim = 0;
  std::vector<Orbit> orbits;
  std::vector<int> orbit_of;               // dyad -> orbit
  std::vector<int> members[2];             // [0]: + sector, [1]: - sector; orbit indices in basis order
  std::vector<int> position[2];            // orbit -> index within the sector basis, or -1

  static int slot(int sector) { return sector > 0 ? 0 : 1; }
  int size(int sector) const { return static_cast<int>(members[slot(sector)].size()); }
  bool contains(int sector, int orbit) const { return position[slot(sector)][static_cast<std::size_t>(orbit)] >= 0; }
  /// Dyad indices grouped by sector: representatives of + basis vectors, then of - basis vectors.
  std::vector<int> sector_permutation() const;
};

SectorMap build_sector_map(const FockSpace& space);

struct LiouvillianMatrix {
  SpMat matrix;
  int dim = 0;  // Hilbert-space dimension; matrix is dim^2 x dim^2
  std::optional<SectorMap> sectors;
};

class MemoryCapExceeded : public std::runtime_error {
 public:
  MemoryCapExceeded(long long dim, double bytes, double cap);
  long long required_dimension() const noexcept { return dim_; }
  double estimated_bytes() const noexcept { return bytes_; }

 private:
  long long dim_;
  double bytes_;
};

struct BuildOptions {
  double memory_cap_bytes = 3.0e9;
};

/// Rough peak memory of assembly and sector extraction.
double estimate_liouvillian_bytes(const FockSpace& space);

/// Elementwise assembly with mirror-consistent summation order, so the result
/// commutes with the parity superoperator exactly.
LiouvillianMatrix build_liouvillian(const DimerParams& p, const FockSpace& space, const BuildOptions& opt = {});

/// Reference assembly from Kronecker products of the operator matrices.
SpMat build_liouvillian_kron(const DimerParams& p, const FockSpace& space);

/// P|n, m> = (-1)^(n + m) |m, n>. Requires equal cutoffs.
SpMat parity_operator(const FockSpace& space);
SpMat parity_superoperator(const FockSpace& space);

/// Largest |(P L P)_{ij} - L_{ij}| over the stored entries, evaluated entrywise.
double parity_commutator_norm(const SpMat& l, const SectorMap& sectors);

struct SectorBlocks {
  SpMat plus;
  SpMat minus;
  double max_cross_entry = 0.0;
};

/// Throws std::logic_error when a cross-sector entry exceeds 1e-13 relative to
/// the largest matrix entry.
SectorBlocks sector_decompose(const LiouvillianMatrix& l);

/// Sector coordinates -> full vectorized space, and the orthogonal projection back.
Eigen::VectorXcd lift(const SectorMap& s, int sector, const Eigen::VectorXcd& y);
Eigen::VectorXcd project(const SectorMap& s, int sector, const Eigen::VectorXcd& x);

/// Coefficients of the trace functional in sector coordinates (+ sector).
Eigen::VectorXcd trace_functional(const SectorMap& s, const FockSpace& space, int sector);

}  // namespace bhd::spectra
