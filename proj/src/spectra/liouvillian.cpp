// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/spectra/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "bhdimer/fock/master.hpp"

namespace bhd::spectra {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

using Column = std::vector<std::pair<int, cplx>>;
using Triplet = Eigen::Triplet<cplx>;

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

int swapped(const FockSpace& s, int i) { return s.index(s.n2(i), s.n1(i)); }

// Column lists of the effective Hamiltonian and the jump operators, written
// so that mirror-image entries are computed by identical expressions.
struct OperatorColumns {
  std::vector<Column> heff, collective, local1, local2;
};

OperatorColumns operator_columns(const DimerParams& p, const FockSpace& s) {
  const auto [f, u] = bare_params(p);
  const int d = s.dim();
  OperatorColumns oc;
  oc.heff.resize(static_cast<std::size_t>(d));
  oc.collective.resize(static_cast<std::size_t>(d));
  oc.local1.resize(static_cast<std::size_t>(d));
  oc.local2.resize(static_cast<std::size_t>(d));
  const cplx hop(-p.j_coupling, -0.5 * p.gamma);
  for (int i = 0; i < d; ++i) {
    const int n1 = s.n1(i), n2 = s.n2(i);
    const double d1 = n1, d2 = n2;
    auto& h = oc.heff[static_cast<std::size_t>(i)];
    const double e = -p.delta * (d1 + d2) + u * (d1 * (d1 - 1.0) + d2 * (d2 - 1.0));
    const double r = (p.gamma + p.kappa) * (d1 + d2);
    if (e != 0.0 || r != 0.0) h.emplace_back(i, cplx(e, -0.5 * r));
    if (n2 > 0 && n1 < s.nmax1()) h.emplace_back(s.index(n1 + 1, n2 - 1), hop * std::sqrt((d1 + 1.0) * d2));
    if (n1 > 0 && n2 < s.nmax2()) h.emplace_back(s.index(n1 - 1, n2 + 1), hop * std::sqrt((d2 + 1.0) * d1));
    if (f != 0.0) {
      if (n1 < s.nmax1()) h.emplace_back(s.index(n1 + 1, n2), cplx(f * std::sqrt(d1 + 1.0), 0.0));
      if (n1 > 0) h.emplace_back(s.index(n1 - 1, n2), cplx(f * std::sqrt(d1), 0.0));
      if (n2 < s.nmax2()) h.emplace_back(s.index(n1, n2 + 1), cplx(-f * std::sqrt(d2 + 1.0), 0.0));
      if (n2 > 0) h.emplace_back(s.index(n1, n2 - 1), cplx(-f * std::sqrt(d2), 0.0));
    }
    auto& j = oc.collective[static_cast<std::size_t>(i)];
    if (n1 > 0) {
      j.emplace_back(s.index(n1 - 1, n2), std::sqrt(d1));
      oc.local1[static_cast<std::size_t>(i)].emplace_back(s.index(n1 - 1, n2), std::sqrt(d1));
    }
    if (n2 > 0) {
      j.emplace_back(s.index(n1, n2 - 1), std::sqrt(d2));
      oc.local2[static_cast<std::size_t>(i)].emplace_back(s.index(n1, n2 - 1), std::sqrt(d2));
    }
  }
  return oc;
}

std::pair<int, int> mirror(const SectorMap& m, int q) {
  const Orbit& o = m.orbits[static_cast<std::size_t>(m.orbit_of[static_cast<std::size_t>(q)])];
  if (o.partner < 0) return {q, o.sign};
  return {q == o.rep ? o.partner : o.rep, o.sign};
}

}  // namespace

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("vectorize expects a square matrix");
  const Eigen::Index d = rho.rows();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("vector length is not a perfect square");
  Eigen::MatrixXcd rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                         static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
  SpMat k(a.rows() * b.rows(), a.cols() * b.cols());
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

SpMat superoperator(const SpMat& left, const SpMat& right) { return kron(left, SpMat(right.transpose())); }

std::vector<int> SectorMap::sector_permutation() const {
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(full_dim));
  for (int slot_index = 0; slot_index < 2; ++slot_index)
    for (int o : members[slot_index]) perm.push_back(orbits[static_cast<std::size_t>(o)].rep);
  return perm;
}

SectorMap build_sector_map(const FockSpace& s) {
  if (!s.symmetric()) throw std::invalid_argument("parity sectors require equal cutoffs");
  const int d = s.dim();
  SectorMap m;
  m.full_dim = d * d;
  m.orbit_of.assign(static_cast<std::size_t>(m.full_dim), -1);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const int q = k * d + l;
      if (m.orbit_of[static_cast<std::size_t>(q)] >= 0) continue;
      const int pq = swapped(s, k) * d + swapped(s, l);
      const int sign = parity_sign(s.n1(k) + s.n2(k) + s.n1(l) + s.n2(l));
      const int id = static_cast<int>(m.orbits.size());
      m.orbits.push_back({q, pq == q ? -1 : pq, sign});
      m.orbit_of[static_cast<std::size_t>(q)] = id;
      if (pq != q) m.orbit_of[static_cast<std::size_t>(pq)] = id;
    }
  }
  for (int slot_index = 0; slot_index < 2; ++slot_index)
    m.position[slot_index].assign(m.orbits.size(), -1);
  for (std::size_t o = 0; o < m.orbits.size(); ++o) {
    const Orbit& orb = m.orbits[o];
    for (int sector : {1, -1}) {
      if (orb.partner < 0 && orb.sign != sector) continue;
      const int slot_index = SectorMap::slot(sector);
      m.position[slot_index][o] = static_cast<int>(m.members[slot_index].size());
      m.members[slot_index].push_back(static_cast<int>(o));
    }
  }
  return m;
}

MemoryCapExceeded::MemoryCapExceeded(long long dim, double bytes, double cap)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "Liouvillian of dimension " << dim << " needs about " << bytes / 1e9 << " GB, above the cap of "
           << cap / 1e9 << " GB";
        return os.str();
      }()),
      dim_(dim),
      bytes_(bytes) {}

double estimate_liouvillian_bytes(const FockSpace& space) {
  const double n = static_cast<double>(space.dim()) * static_cast<double>(space.dim());
  // about 20 entries per column, stored twice (column- and row-major) plus blocks
  return n * 20.0 * (sizeof(cplx) + sizeof(int)) * 3.0 + n * 64.0;
}

LiouvillianMatrix build_liouvillian(const DimerParams& p, const FockSpace& space, const BuildOptions& opt) {
  p.validate();
  const double bytes = estimate_liouvillian_bytes(space);
  if (bytes > opt.memory_cap_bytes)
    throw MemoryCapExceeded(static_cast<long long>(space.dim()) * space.dim(), bytes, opt.memory_cap_bytes);

  const int d = space.dim();
  const int n = d * d;
  const OperatorColumns oc = operator_columns(p, space);

  std::vector<int> outer(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> inner;
  std::vector<cplx> values;
  inner.reserve(static_cast<std::size_t>(n) * 16);
  values.reserve(static_cast<std::size_t>(n) * 16);

  struct Entry {
    int row;
    cplx value;
  };
  std::vector<Entry> col;
  auto add_jump = [&](const std::vector<Column>& ops, double rate, int k, int l) {
    if (rate == 0.0) return;
    for (const auto& [kr, a] : ops[static_cast<std::size_t>(k)])
      for (const auto& [lr, b] : ops[static_cast<std::size_t>(l)]) col.push_back({kr * d + lr, rate * a * std::conj(b)});
  };
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const int q = k * d + l;
      col.clear();
      for (const auto& [kr, h] : oc.heff[static_cast<std::size_t>(k)]) col.push_back({kr * d + l, -kI * h});
      for (const auto& [lr, h] : oc.heff[static_cast<std::size_t>(l)]) col.push_back({k * d + lr, kI * std::conj(h)});
      add_jump(oc.collective, p.gamma, k, l);
      add_jump(oc.local1, p.kappa, k, l);
      add_jump(oc.local2, p.kappa, k, l);
      std::stable_sort(col.begin(), col.end(), [](const Entry& x, const Entry& y) { return x.row < y.row; });
      for (std::size_t i = 0; i < col.size();) {
        cplx sum = col[i].value;
        std::size_t j = i + 1;
        while (j < col.size() && col[j].row == col[i].row) sum += col[j++].value;
        if (sum != cplx(0.0)) {
          inner.push_back(col[i].row);
          values.push_back(sum);
        }
        i = j;
      }
      outer[static_cast<std::size_t>(q) + 1] = static_cast<int>(inner.size());
    }
  }
  LiouvillianMatrix out;
  out.dim = d;
  out.matrix = Eigen::Map<const SpMat>(n, n, static_cast<Eigen::Index>(inner.size()), outer.data(), inner.data(),
                                       values.data());
  if (space.symmetric()) out.sectors = build_sector_map(space);
  return out;
}

SpMat build_liouvillian_kron(const DimerParams& p, const FockSpace& space) {
  const fock::Lindbladian gen(p, space);
  const int d = space.dim();
  SpMat id(d, d);
  id.setIdentity();
  const SpMat& heff = gen.effective_hamiltonian();
  SpMat l = (-kI) * superoperator(heff, id);
  l += kI * superoperator(id, SpMat(heff.adjoint()));
  for (const auto& c : gen.channels()) l += c.rate * superoperator(c.op, SpMat(c.op.adjoint()));
  l.prune(cplx(0.0));
  l.makeCompressed();
  return l;
}

SpMat parity_operator(const FockSpace& s) {
  if (!s.symmetric()) throw std::invalid_argument("parity operator requires equal cutoffs");
  std::vector<Triplet> t;
  for (int i = 0; i < s.dim(); ++i) t.emplace_back(swapped(s, i), i, static_cast<double>(parity_sign(s.n1(i) + s.n2(i))));
  SpMat p(s.dim(), s.dim());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

SpMat parity_superoperator(const FockSpace& s) {
  const SpMat p = parity_operator(s);
  return kron(p, SpMat(p.conjugate()));
}

double parity_commutator_norm(const SpMat& l, const SectorMap& m) {
  double worst = 0.0;
  for (int c = 0; c < l.outerSize(); ++c) {
    const auto [mc, sc] = mirror(m, c);
    for (SpMat::InnerIterator it(l, c); it; ++it) {
      const auto [mr, sr] = mirror(m, static_cast<int>(it.row()));
      const cplx mirrored = l.coeff(mr, mc);
      worst = std::max(worst, std::abs(mirrored - static_cast<double>(sr * sc) * it.value()));
    }
  }
  return worst;
}

SectorBlocks sector_decompose(const LiouvillianMatrix& l) {
  if (!l.sectors) throw std::invalid_argument("Liouvillian carries no sector map (unequal cutoffs)");
  const SectorMap& m = *l.sectors;
  const SpMatRow rows = l.matrix;
  const double scale = std::max(1.0, l.matrix.coeffs().cwiseAbs().maxCoeff());
  const double tol = 1e-13 * scale;

  SectorBlocks out;
  for (int sector : {1, -1}) {
    const int slot_index = SectorMap::slot(sector);
    const int size = m.size(sector);
    const auto& pos = m.position[slot_index];
    std::vector<cplx> acc_m(static_cast<std::size_t>(size)), acc_p(static_cast<std::size_t>(size));
    std::vector<int> touched;
    std::vector<char> seen(static_cast<std::size_t>(size), 0);
    // (L u_o)_r for a sector basis vector u_o, accumulated over the stored entries of row r.
    auto row_action = [&](int r, std::vector<cplx>& acc) {
      for (SpMatRow::InnerIterator it(rows, r); it; ++it) {
        const int q = static_cast<int>(it.col());
        const int o = m.orbit_of[static_cast<std::size_t>(q)];
        const int col = pos[static_cast<std::size_t>(o)];
        if (col < 0) continue;
        const Orbit& orb = m.orbits[static_cast<std::size_t>(o)];
        double coef = 1.0;
        if (orb.partner >= 0) coef = (q == orb.rep) ? kInvSqrt2 : kInvSqrt2 * sector * orb.sign;
        acc[static_cast<std::size_t>(col)] += coef * it.value();
        if (!seen[static_cast<std::size_t>(col)]) {
          seen[static_cast<std::size_t>(col)] = 1;
          touched.push_back(col);
        }
      }
    };
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(rows.nonZeros()) / 2 + 16);
    for (std::size_t o = 0; o < m.orbits.size(); ++o) {
      const Orbit& orb = m.orbits[o];
      touched.clear();
      row_action(orb.rep, acc_m);
      const int row_pos = pos[o];
      if (orb.partner >= 0) {
        row_action(orb.partner, acc_p);
        for (int c : touched) {
          const cplx vm = acc_m[static_cast<std::size_t>(c)], vp = acc_p[static_cast<std::size_t>(c)];
          const double cross = std::abs(kInvSqrt2 * (vm - static_cast<double>(sector * orb.sign) * vp));
          out.max_cross_entry = std::max(out.max_cross_entry, cross);
          if (vm != cplx(0.0)) trip.emplace_back(row_pos, c, kSqrt2 * vm);
        }
      } else {
        for (int c : touched) {
          const cplx vm = acc_m[static_cast<std::size_t>(c)];
          if (row_pos >= 0) {
            if (vm != cplx(0.0)) trip.emplace_back(row_pos, c, vm);
          } else {
            out.max_cross_entry = std::max(out.max_cross_entry, std::abs(vm));
          }
        }
      }
      for (int c : touched) {
        acc_m[static_cast<std::size_t>(c)] = 0.0;
        acc_p[static_cast<std::size_t>(c)] = 0.0;
        seen[static_cast<std::size_t>(c)] = 0;
      }
    }
    SpMat block(size, size);
    block.setFromTriplets(trip.begin(), trip.end());
    block.makeCompressed();
    (sector > 0 ? out.plus : out.minus) = std::move(block);
  }
  if (out.max_cross_entry > tol) {
    std::ostringstream os;
    os << "parity sector decomposition found a cross-sector entry of " << out.max_cross_entry;
    throw std::logic_error(os.str());
  }
  return out;
}

Eigen::VectorXcd lift(const SectorMap& m, int sector, const Eigen::VectorXcd& y) {
  const auto& mem = m.members[SectorMap::slot(sector)];
  if (y.size() != static_cast<Eigen::Index>(mem.size())) throw std::invalid_argument("sector vector has wrong length");
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m.full_dim);
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const Orbit& o = m.orbits[static_cast<std::size_t>(mem[i])];
    if (o.partner < 0) {
      x(o.rep) = y(static_cast<Eigen::Index>(i));
    } else {
      x(o.rep) = kInvSqrt2 * y(static_cast<Eigen::Index>(i));
      x(o.partner) = (kInvSqrt2 * sector * o.sign) * y(static_cast<Eigen::Index>(i));
    }
  }
  return x;
}

Eigen::VectorXcd project(const SectorMap& m, int sector, const Eigen::VectorXcd& x) {
  if (x.size() != m.full_dim) throw std::invalid_argument("vector has wrong length");
  const auto& mem = m.members[SectorMap::slot(sector)];
  Eigen::VectorXcd y(static_cast<Eigen::Index>(mem.size()));
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const Orbit& o = m.orbits[static_cast<std::size_t>(mem[i])];
    y(static_cast<Eigen::Index>(i)) =
        o.partner < 0 ? x(o.rep) : kInvSqrt2 * (x(o.rep) + static_cast<double>(sector * o.sign) * x(o.partner));
  }
  return y;
}

Eigen::VectorXcd trace_functional(const SectorMap& m, const FockSpace& space, int sector) {
  const int d = space.dim();
  Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(m.full_dim);
  for (int k = 0; k < d; ++k) diag(k * d + k) = 1.0;
  return project(m, sector, diag);
}

}  // namespace bhd::spectra
