// Copyright 2026 The evuniv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dimension of the simultaneous fixed subspace  {v : U v = v for all U}  of
// a list of unitary TensorWordOperators.
//
// Both methods first fold every operator that permutes basis states into an
// orbit basis: a vector fixed by a set of basis permutations is constant on
// the orbits of the group they generate, so the orthonormal orbit indicator
// vectors span exactly that fixed space. The remaining operators are closed
// under inverses and averaged into the Hermitian contraction
//     A = Q^dagger (1/|S|) sum_{U in S} U Q,
// whose eigenvalue-1 eigenspace is the answer (for unitary U,
// Re<v, U v> = |v|^2 iff U v = v).
//
//   Dense       assemble A and diagonalize it.
//   MatrixFree  deflated block Lanczos on A; a count is accepted only when a
//               fresh run with a doubled Krylov budget finds nothing new.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evuniv/errors.hpp"
#include "evuniv/tensor.hpp"

namespace evuniv {

enum class SubspaceMethod { Dense, MatrixFree, Auto };

inline const char* to_string(SubspaceMethod m) {
  switch (m) {
    case SubspaceMethod::Dense: return "Dense";
    case SubspaceMethod::MatrixFree: return "MatrixFree";
    case SubspaceMethod::Auto: return "Auto";
  }
  return "?";
}

struct FixedSubspaceOptions {
  /// Auto picks Dense at or below this operator dimension. Dense refuses
  /// anything larger.
  std::size_t dense_threshold = 4096;
  /// Eigenvalues of A within this distance of 1 count as fixed directions.
  double eigen_tolerance = 1e-8;
  /// The next eigenvalue must sit at least this far below 1.
  double gap_threshold = 1e-4;
  /// Lanczos residual below which a Ritz pair is considered converged.
  double residual_tolerance = 1e-7;
  std::size_t block_size = 4;
  std::size_t krylov_budget = 160;
  std::size_t max_krylov_budget = 1280;
  std::size_t max_rounds = 24;
  /// Cap on the Krylov basis memory.
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct FixedSubspaceResult {
  std::size_t dimension = 0;
  SubspaceMethod method = SubspaceMethod::Dense;
  std::size_t full_dimension = 0;
  /// Number of permutation orbits, i.e. the size of the reduced problem.
  std::size_t reduced_dimension = 0;
  std::size_t permutation_operators = 0;
  std::size_t averaged_operators = 0;
  /// 1 minus the largest eigenvalue of A below the unit cluster; NaN when
  /// the fixed space is everything.
  double spectral_gap = std::numeric_limits<double>::quiet_NaN();
  std::size_t matvecs = 0;
};

namespace detail {

class OrbitReduction {
 public:
  OrbitReduction(std::size_t dim, const std::vector<std::vector<std::uint32_t>>& perms)
      : orbit_of_(dim) {
    std::vector<std::uint32_t> parent(dim);
    for (std::size_t i = 0; i < dim; ++i) parent[i] = static_cast<std::uint32_t>(i);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (const auto& p : perms) {
      for (std::size_t i = 0; i < dim; ++i) {
        const auto a = find(static_cast<std::uint32_t>(i));
        const auto b = find(p[i]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    std::vector<std::uint32_t> label(dim, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < dim; ++i) {
      const auto root = find(static_cast<std::uint32_t>(i));
      if (label[root] == std::numeric_limits<std::uint32_t>::max()) {
        label[root] = static_cast<std::uint32_t>(sizes.size());
        sizes.push_back(0);
      }
      orbit_of_[i] = label[root];
      ++sizes[label[root]];
    }
    weight_.resize(sizes.size());
    for (std::size_t o = 0; o < sizes.size(); ++o) {
      weight_[o] = 1.0 / std::sqrt(static_cast<double>(sizes[o]));
    }
  }

  std::size_t full_dim() const { return orbit_of_.size(); }
  std::size_t count() const { return weight_.size(); }

  void expand(const Vector& c, std::vector<Complex>& full) const {
    full.resize(orbit_of_.size());
    for (std::size_t i = 0; i < orbit_of_.size(); ++i) {
      const auto o = orbit_of_[i];
      full[i] = c[o] * weight_[o];
    }
  }

  void compress(const std::vector<Complex>& full, Vector& c) const {
    c.setZero(static_cast<Eigen::Index>(count()));
    for (std::size_t i = 0; i < orbit_of_.size(); ++i) c[orbit_of_[i]] += full[i];
    for (std::size_t o = 0; o < count(); ++o) c[o] *= weight_[o];
  }

 private:
  std::vector<std::uint32_t> orbit_of_;
  std::vector<double> weight_;
};

/// x -> Q^dagger (1/|S|) sum_U U Q x.
class ReducedAverage {
 public:
  ReducedAverage(const OrbitReduction& orbits, std::vector<CompiledOperator> ops)
      : orbits_(orbits), ops_(std::move(ops)) {}

  std::size_t dim() const { return orbits_.count(); }

  Vector apply(const Vector& x) const {
    ++matvecs_;
    orbits_.expand(x, in_);
    acc_.assign(in_.size(), Complex{0.0, 0.0});
    out_.resize(in_.size());
    for (const auto& op : ops_) {
      op.apply(in_, out_);
      for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += out_[i];
    }
    const double scale = 1.0 / static_cast<double>(ops_.size());
    for (auto& a : acc_) a *= scale;
    Vector y;
    orbits_.compress(acc_, y);
    return y;
  }

  std::size_t matvecs() const { return matvecs_; }

 private:
  const OrbitReduction& orbits_;
  std::vector<CompiledOperator> ops_;
  mutable std::vector<Complex> in_, out_, acc_;
  mutable std::size_t matvecs_ = 0;
};

inline Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex{g(rng), g(rng)};
  return v;
}

/// Removes components along `basis` (orthonormal columns 0..cols) twice.
inline void orthogonalize(
    Vector& w, const Matrix& basis, Eigen::Index cols, const std::vector<Vector>& extra) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& e : extra) w -= e * e.dot(w);
    if (cols > 0) {
      const auto v = basis.leftCols(cols);
      const Vector h = v.adjoint() * w;
      w -= v * h;
    }
  }
}

struct KrylovRun {
  std::vector<Vector> unit_vectors;
  double top_rest = -std::numeric_limits<double>::infinity();
  double top_rest_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool exhausted = false;   // Krylov space became invariant: result is exact
  bool saturated = false;   // unit count reached the block size
  std::size_t basis_size = 0;
};

/// One deflated block Lanczos run with full reorthogonalization.
inline KrylovRun block_krylov(
    const ReducedAverage& a, const std::vector<Vector>& deflate, std::size_t block,
    std::size_t budget, std::mt19937_64& rng, const FixedSubspaceOptions& opt) {
  const std::size_t n = a.dim();
  const std::size_t free_dim = n - deflate.size();
  budget = std::min(budget, free_dim);
  block = std::max<std::size_t>(1, std::min(block, budget));

  KrylovRun run;
  Matrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(budget));
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(budget), static_cast<Eigen::Index>(budget));
  const double drop = 1e-10;

  // Starting block.
  Eigen::Index total = 0;
  for (std::size_t j = 0; j < block; ++j) {
    Vector w = random_vector(n, rng);
    orthogonalize(w, v, total, deflate);
    const double nrm = w.norm();
    if (nrm < drop) continue;
    v.col(total++) = w / nrm;
  }
  if (total == 0) {
    run.converged = run.exhausted = true;
    return run;
  }
  const auto initial_block = static_cast<std::size_t>(total);

  Eigen::Index block_begin = 0;
  Eigen::Index block_end = total;
  Matrix coupling;  // R from the QR of the next raw block
  std::size_t since_check = 0;

  while (true) {
    // Expand the current block.
    std::vector<Vector> raw;
    for (Eigen::Index j = block_begin; j < block_end; ++j) {
      Vector w = a.apply(v.col(j));
      const Vector h = v.leftCols(total).adjoint() * w;
      for (Eigen::Index i = 0; i < total; ++i) {
        t(i, j) = h[i];
        if (i < block_begin) t(j, i) = std::conj(h[i]);
      }
      w -= v.leftCols(total) * h;
      raw.push_back(std::move(w));
    }
    const Eigen::Index width = block_end - block_begin;
    coupling = Matrix::Zero(0, width);
    std::vector<Vector> next;
    std::vector<Vector> next_coeffs;
    const bool room = static_cast<std::size_t>(total) < budget;
    for (Eigen::Index c = 0; c < width; ++c) {
      Vector w = raw[static_cast<std::size_t>(c)];
      Vector r = Vector::Zero(width);
      // Gram-Schmidt against already accepted vectors of the new block.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& e : deflate) w -= e * e.dot(w);
        const Vector h = v.leftCols(total).adjoint() * w;
        w -= v.leftCols(total) * h;
        for (std::size_t k = 0; k < next.size(); ++k) {
          const Complex s = next[k].dot(w);
          w -= s * next[k];
          next_coeffs[k][c] += s;
        }
      }
      const double nrm = w.norm();
      if (nrm > drop * std::max(1.0, raw[static_cast<std::size_t>(c)].norm()) && nrm > drop) {
        next.push_back(w / nrm);
        Vector coeff = Vector::Zero(width);
        coeff[c] = nrm;
        next_coeffs.push_back(std::move(coeff));
      }
    }
    coupling.resize(static_cast<Eigen::Index>(next.size()), width);
    for (std::size_t k = 0; k < next.size(); ++k) coupling.row(static_cast<Eigen::Index>(k)) = next_coeffs[k].transpose();

    const bool invariant = next.empty();
    const bool full = !room || static_cast<std::size_t>(total) + next.size() > budget;
    ++since_check;
    const bool check = invariant || full || since_check >= 4;

    if (check) {
      since_check = 0;
      Matrix tt = t.topLeftCorner(total, total);
      tt = (0.5 * (tt + tt.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(tt);
      const auto& theta = es.eigenvalues();
      const Matrix& s = es.eigenvectors();
      auto residual = [&](Eigen::Index k) {
        if (coupling.rows() == 0) return 0.0;
        const Vector last = s.col(k).segment(block_begin, width);
        return (coupling * last).norm();
      };
      std::vector<Eigen::Index> units;
      bool all_ok = true;
      run.top_rest = -std::numeric_limits<double>::infinity();
      run.top_rest_residual = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = total - 1; k >= 0; --k) {
        const double th = theta[k];
        const double res = residual(k);
        if (th >= 1.0 - opt.eigen_tolerance) {
          units.push_back(k);
          if (res > opt.residual_tolerance) all_ok = false;
        } else {
          run.top_rest = th;
          run.top_rest_residual = res;
          if (res > opt.residual_tolerance) all_ok = false;
          break;
        }
      }
      const bool done = invariant || all_ok;
      if (done || full) {
        run.converged = done;
        run.exhausted = invariant;
        run.basis_size = static_cast<std::size_t>(total);
        for (auto k : units) {
          if (residual(k) > opt.residual_tolerance) continue;
          Vector y = v.leftCols(total) * s.col(k);
          run.unit_vectors.push_back(y.normalized());
        }
        run.saturated = run.unit_vectors.size() >= initial_block &&
                        run.unit_vectors.size() < free_dim;
        if (invariant && run.top_rest == -std::numeric_limits<double>::infinity()) {
          run.top_rest_residual = 0.0;
        }
        return run;
      }
    }

    // Append the next block.
    block_begin = total;
    for (auto& w : next) v.col(total++) = w;
    block_end = total;
  }
}

inline std::size_t count_dense_units(
    const Matrix& a, const FixedSubspaceOptions& opt, double& gap) {
  Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::size_t units = 0;
  double top_rest = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] >= 1.0 - opt.eigen_tolerance) {
      ++units;
    } else {
      top_rest = std::max(top_rest, ev[i]);
    }
  }
  gap = std::isinf(top_rest) ? std::numeric_limits<double>::quiet_NaN() : 1.0 - top_rest;
  if (!std::isinf(top_rest) && top_rest > 1.0 - opt.gap_threshold) {
    throw Inconclusive(
        "fixed-subspace spectrum has an eigenvalue " + std::to_string(top_rest) +
        " within the gap threshold of 1; refusing to round the count");
  }
  return units;
}

}  // namespace detail

/// Fixed-subspace dimension with the full diagnostic record.
inline FixedSubspaceResult fixed_subspace(
    std::span<const TensorWordOperator> ops, std::size_t dim,
    SubspaceMethod method = SubspaceMethod::Auto,
    const FixedSubspaceOptions& opt = {}) {
  for (const auto& op : ops) {
    if (op.dim() != dim) {
      throw ValidationError(
          "operator of dimension " + std::to_string(op.dim()) +
          " in a fixed-subspace query of dimension " + std::to_string(dim));
    }
  }
  if (method == SubspaceMethod::Auto) {
    method = dim <= opt.dense_threshold ? SubspaceMethod::Dense : SubspaceMethod::MatrixFree;
  }
  if (method == SubspaceMethod::Dense && dim > opt.dense_threshold) {
    throw ResourceError(
        "dense fixed-subspace computation of dimension " + std::to_string(dim) +
        " exceeds the dense threshold " + std::to_string(opt.dense_threshold));
  }

  FixedSubspaceResult result;
  result.method = method;
  result.full_dimension = dim;

  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<const TensorWordOperator*> others;
  for (const auto& op : ops) {
    if (auto p = op.basis_permutation()) {
      perms.push_back(std::move(*p));
    } else {
      others.push_back(&op);
    }
  }
  result.permutation_operators = perms.size();
  detail::OrbitReduction orbits(dim, perms);
  perms.clear();
  result.reduced_dimension = orbits.count();

  // Close the remaining operators under inverses, dropping exact repeats
  // (detected on a random probe vector).
  std::mt19937_64 rng(opt.seed);
  std::vector<CompiledOperator> averaged;
  {
    const Vector probe = detail::random_vector(dim, rng);
    std::vector<Vector> images;
    auto add = [&](const TensorWordOperator& op) {
      CompiledOperator c(op);
      Vector img(static_cast<Eigen::Index>(dim));
      c.apply(std::span<const Complex>(probe.data(), dim), std::span<Complex>(img.data(), dim));
      if ((img - probe).norm() <= 1e-11 * probe.norm()) return;  // identity
      for (const auto& seen : images) {
        if ((seen - img).norm() <= 1e-11 * probe.norm()) return;
      }
      images.push_back(std::move(img));
      averaged.push_back(std::move(c));
    };
    for (const auto* op : others) {
      add(*op);
      add(op->inverse());
    }
  }
  result.averaged_operators = averaged.size();
  if (averaged.empty()) {
    result.dimension = orbits.count();
    return result;
  }

  detail::ReducedAverage a(orbits, std::move(averaged));
  const std::size_t r = orbits.count();

  if (method == SubspaceMethod::Dense) {
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    Vector e = Vector::Zero(static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < r; ++j) {
      e[static_cast<Eigen::Index>(j)] = 1.0;
      m.col(static_cast<Eigen::Index>(j)) = a.apply(e);
      e[static_cast<Eigen::Index>(j)] = 0.0;
    }
    result.dimension = detail::count_dense_units(m, opt, result.spectral_gap);
    result.matvecs = a.matvecs();
    return result;
  }

  // Matrix-free.
  const std::size_t bytes_per_vec = r * sizeof(Complex);
  const std::size_t mem_cap = std::max<std::size_t>(8, opt.memory_budget_bytes / bytes_per_vec);
  std::size_t budget = std::min(opt.krylov_budget, mem_cap);
  std::size_t block = opt.block_size;
  std::vector<Vector> found;
  bool have_candidate = false;   // a run has produced the current count
  double last_gap = std::numeric_limits<double>::quiet_NaN();

  auto add_found = [&](const std::vector<Vector>& vs) {
    std::size_t added = 0;
    for (auto w : vs) {
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& f : found) w -= f * f.dot(w);
      }
      const double nrm = w.norm();
      if (nrm > 1e-6) {
        found.push_back(w / nrm);
        ++added;
      }
    }
    return added;
  };

  for (std::size_t round = 0; round < opt.max_rounds; ++round) {
    if (found.size() == r) {
      result.dimension = r;
      result.matvecs = a.matvecs();
      return result;
    }
    const auto run = detail::block_krylov(a, found, block, budget, rng, opt);
    if (!run.converged) {
      if (budget >= std::min(opt.max_krylov_budget, mem_cap)) {
        throw Inconclusive(
            "matrix-free fixed-subspace solve did not converge within a Krylov budget of " +
            std::to_string(budget) + " vectors (reduced dimension " + std::to_string(r) + ")");
      }
      budget = std::min(budget * 2, std::min(opt.max_krylov_budget, mem_cap));
      continue;
    }
    const std::size_t added = add_found(run.unit_vectors);
    if (!std::isinf(run.top_rest) && run.top_rest > 1.0 - opt.gap_threshold) {
      throw Inconclusive(
          "matrix-free fixed-subspace spectrum has an eigenvalue " +
          std::to_string(run.top_rest) + " within the gap threshold of 1");
    }
    last_gap = std::isinf(run.top_rest) ? std::numeric_limits<double>::quiet_NaN()
                                         : 1.0 - run.top_rest;
    if (run.saturated) {
      block *= 2;
      have_candidate = false;
      continue;
    }
    if (run.exhausted || (added == 0 && have_candidate)) {
      result.dimension = found.size();
      result.spectral_gap = last_gap;
      result.matvecs = a.matvecs();
      return result;
    }
    // Confirm with a fresh start and a doubled budget.
    have_candidate = true;
    budget = std::min(budget * 2, std::min(opt.max_krylov_budget, mem_cap));
  }
  throw Inconclusive(
      "matrix-free fixed-subspace count did not stabilize after " +
      std::to_string(opt.max_rounds) + " rounds");
}

inline std::size_t fixed_subspace_dimension(
    std::span<const TensorWordOperator> ops, std::size_t dim,
    SubspaceMethod method = SubspaceMethod::Auto,
    const FixedSubspaceOptions& opt = {}) {
  return fixed_subspace(ops, dim, method, opt).dimension;
}

}  // namespace evuniv
