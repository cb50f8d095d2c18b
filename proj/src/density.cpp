#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "aqss/errors.hpp"
#include "aqss/qudit_register.hpp"

namespace aqss {

namespace {

using Index = QuditRegister::Index;

// Splits a basis index into the local value over `sites` (listed order) and
// the index with those digits zeroed, which identifies the traced-out part.
struct Split {
  Index kept;
  Index traced;
  Complex amplitude;
};

std::vector<Split> split_entries(const QuditRegister& reg, std::span<const std::size_t> sites) {
  std::vector<Split> out;
  out.reserve(reg.support());
  for (const auto& e : reg.entries()) {
    Index kept = 0;
    Index traced = e.index;
    for (auto s : sites) {
      const auto d = reg.digit(e.index, s);
      kept = kept * reg.dim(s) + d;
      traced -= d * reg.stride(s);
    }
    out.push_back({kept, traced, e.amplitude});
  }
  return out;
}

void check_sites(const QuditRegister& reg, std::span<const std::size_t> sites) {
  std::vector<std::size_t> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("repeated site");
  for (auto s : sorted)
    if (s >= reg.site_count()) throw std::out_of_range("site out of range");
}

double abs_eigen_sum(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

bool DensityView::is_valid() const {
  if (matrix.rows() != matrix.cols()) return false;
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10) return false;
  if (std::abs(matrix.trace() - Complex{1.0, 0.0}) > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -1e-8;
}

DensityView reduced_density(const QuditRegister& reg, std::span<const std::size_t> sites) {
  check_sites(reg, sites);
  DensityView view;
  view.sites.assign(sites.begin(), sites.end());
  std::size_t dim = 1;
  for (auto s : sites) {
    view.dims.push_back(reg.dim(s));
    dim *= reg.dim(s);
    if (dim > kMaxDenseDensity)
      throw CapacityError("reduced state over " + std::to_string(sites.size()) + " sites exceeds the dense limit");
  }
  auto parts = split_entries(reg, sites);
  std::sort(parts.begin(), parts.end(), [](const Split& a, const Split& b) {
    return a.traced != b.traced ? a.traced < b.traced : a.kept < b.kept;
  });
  view.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t lo = 0; lo < parts.size();) {
    std::size_t hi = lo;
    while (hi < parts.size() && parts[hi].traced == parts[lo].traced) ++hi;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = lo; j < hi; ++j)
        view.matrix(static_cast<Eigen::Index>(parts[i].kept), static_cast<Eigen::Index>(parts[j].kept)) +=
            parts[i].amplitude * std::conj(parts[j].amplitude);
    lo = hi;
  }
  return view;
}

DensityView pure_density(const QuditRegister& reg) {
  std::vector<std::size_t> all(reg.site_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return reduced_density(reg, all);
}

Distance distance(const DensityView& a, const DensityView& b) {
  if (a.matrix.rows() != b.matrix.rows() || a.dims != b.dims)
    throw std::invalid_argument("density matrices have different dimensions");
  Distance out;
  out.trace_distance = std::clamp(0.5 * abs_eigen_sum(a.matrix - b.matrix), 0.0, 1.0);
  const Eigen::MatrixXcd ra = psd_sqrt(a.matrix);
  const Eigen::MatrixXcd inner = ra * b.matrix * ra;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double root_sum = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  out.fidelity = std::clamp(root_sum * root_sum, 0.0, 1.0);
  return out;
}

double fidelity_to_pure(const DensityView& rho, const QuditRegister& psi) {
  if (psi.dims() != rho.dims) throw std::invalid_argument("reference state has different dimensions");
  const Eigen::VectorXcd v = psi.dense_vector();
  return std::clamp((v.adjoint() * rho.matrix * v)(0, 0).real(), 0.0, 1.0);
}

double subsystem_trace_distance(const QuditRegister& a, const QuditRegister& b, std::span<const std::size_t> sites) {
  if (a.dims() != b.dims()) throw std::invalid_argument("registers have different dimensions");
  check_sites(a, sites);
  const auto pa = split_entries(a, sites);
  const auto pb = split_entries(b, sites);

  // Bipartite union-find over kept values and traced values.
  std::unordered_map<Index, std::size_t> kept_id, traced_id;
  auto id_of = [](std::unordered_map<Index, std::size_t>& m, Index key) {
    return m.try_emplace(key, m.size()).first->second;
  };
  for (const auto* parts : {&pa, &pb})
    for (const auto& p : *parts) {
      id_of(kept_id, p.kept);
      id_of(traced_id, p.traced);
    }
  const std::size_t nk = kept_id.size();
  std::vector<std::size_t> parent(nk + traced_id.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto* parts : {&pa, &pb})
    for (const auto& p : *parts) {
      const auto x = find(kept_id[p.kept]);
      const auto y = find(nk + traced_id[p.traced]);
      if (x != y) parent[x] = y;
    }

  // Per component: column vectors phi_e (one per traced value and state).
  struct Column {
    std::vector<std::pair<std::size_t, Complex>> cells;  // (kept id, amplitude)
    double sign;
  };
  std::unordered_map<std::size_t, std::vector<Column>> columns;
  std::unordered_map<std::size_t, std::vector<std::size_t>> kept_members;
  for (const auto& [value, id] : kept_id) kept_members[find(id)].push_back(id);
  for (int which = 0; which < 2; ++which) {
    const auto& parts = which == 0 ? pa : pb;
    std::unordered_map<Index, std::size_t> column_of;
    for (const auto& p : parts) {
      const auto comp = find(nk + traced_id[p.traced]);
      auto [it, fresh] = column_of.try_emplace(p.traced, 0);
      auto& cols = columns[comp];
      if (fresh) {
        it->second = cols.size();
        cols.push_back({{}, which == 0 ? 1.0 : -1.0});
      }
      cols[it->second].cells.emplace_back(kept_id[p.kept], p.amplitude);
    }
  }

  double total = 0.0;
  for (auto& [comp, cols] : columns) {
    const auto& members = kept_members[comp];
    std::unordered_map<std::size_t, Eigen::Index> local;
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<Eigen::Index>(i);
    const auto rows = static_cast<Eigen::Index>(members.size());
    const auto ncol = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, ncol);
    Eigen::VectorXd signs(ncol);
    for (Eigen::Index c = 0; c < ncol; ++c) {
      signs(c) = cols[static_cast<std::size_t>(c)].sign;
      for (const auto& [kid, amp] : cols[static_cast<std::size_t>(c)].cells) m(local[kid], c) += amp;
    }
    if (rows <= ncol) {
      total += abs_eigen_sum(m * signs.asDiagonal() * m.adjoint());
    } else {
      // Nonzero spectrum of M J M^dagger equals that of sqrt(G) J sqrt(G), G = M^dagger M.
      const Eigen::MatrixXcd root = psd_sqrt(m.adjoint() * m);
      total += abs_eigen_sum(root * signs.asDiagonal() * root);
    }
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

}  // namespace aqss
