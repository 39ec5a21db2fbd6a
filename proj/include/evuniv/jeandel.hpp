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

// Jeandel's family of (k+2)-qubit gates. For a 2-qubit involution A the gate
// B_k(A) applies A to qubits 0,1 when the k control qubits 2..k+1 read all
// zeros or all ones, and does nothing otherwise. Such a family needs many
// ancillas before it becomes universal: on 2k-2 qubits the balanced strings
// never satisfy the control condition, while on 2k+1 qubits (k a power of
// two) running B once for every k-subset of the controls applies A exactly
// once.

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "evuniv/errors.hpp"
#include "evuniv/gates.hpp"
#include "evuniv/gateset.hpp"
#include "evuniv/tensor.hpp"

namespace evuniv {

using BigInt = boost::multiprecision::cpp_int;

struct JeandelFamily {
  std::size_t k = 0;
  std::vector<std::string> labels;
  /// 2-qubit involutions, rescaled so that A^2 = I exactly up to rounding.
  std::vector<Matrix> base;
  /// B_k(A) for each base gate, dimension 2^(k+2).
  std::vector<Matrix> gates;

  std::vector<LabeledMatrix> labeled_gates() const {
    std::vector<LabeledMatrix> out;
    for (std::size_t i = 0; i < gates.size(); ++i) out.push_back({"B" + std::to_string(k) + "(" + labels[i] + ")", gates[i]});
    return out;
  }

  GateSet as_gateset() const { return GateSet::from_matrices(2, k + 2, labeled_gates()); }
};

inline constexpr double kInvolutionTolerance = 1e-10;

/// Default 2-qubit involutions: CZ, H on either qubit, controlled-H, and
/// (X+Y+Z)/sqrt(3) on qubit 0. The last one is complex and outside the
/// Clifford group; without it every gate is real and the set only generates
/// a subgroup of O(4).
inline std::vector<LabeledMatrix> default_omega() {
  const Matrix i2 = gates::identity(2);
  return {{"CZ", gates::CZ()},
          {"H*I", kron(gates::H(), i2)},
          {"I*H", kron(i2, gates::H())},
          {"CH", gates::CH()},
          {"V*I", kron(gates::V(), i2)}};
}

/// `a` rescaled so that its square is exactly the identity; throws when a^2
/// is not a scalar.
inline Matrix involution_representative(const Matrix& a, const std::string& label) {
  const Matrix sq = a * a;
  const auto m = sq.rows();
  const Complex c = sq.trace() / static_cast<double>(m);
  if (std::abs(std::abs(c) - 1.0) > kInvolutionTolerance ||
      (sq - c * Matrix::Identity(m, m)).norm() > kInvolutionTolerance) {
    throw ValidationError("gate '" + label + "' is not an involution (A^2 is not a multiple of I)");
  }
  return a * std::polar(1.0, -std::arg(c) / 2.0);
}

/// B_k(a): 2^(k+2)-dimensional, targets are qubits 0 and 1.
inline Matrix jeandel_gate(const Matrix& a, std::size_t k) {
  if (a.rows() != 4 || a.cols() != 4) throw ValidationError("Jeandel base gates act on 2 qubits");
  const std::size_t controls = std::size_t{1} << k;
  const std::size_t dim = 4 * controls;
  checked_pow(2, k + 2);
  Matrix b = Matrix::Identity(dim, dim);
  for (std::size_t c : {std::size_t{0}, controls - 1}) {
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t s = 0; s < 4; ++s) b(t * controls + c, s * controls + c) = a(t, s);
    }
  }
  return b;
}

inline JeandelFamily build_family(const std::vector<LabeledMatrix>& omega, std::size_t k) {
  if (k < 2) throw ValidationError("Jeandel control count k must be at least 2");
  if (omega.empty()) throw ValidationError("Jeandel base set is empty");
  JeandelFamily fam;
  fam.k = k;
  for (const auto& [label, a] : omega) {
    if (a.rows() != 4 || a.cols() != 4) {
      throw ValidationError("Jeandel base gate '" + label + "' is not a 2-qubit gate");
    }
    if (unitarity_defect(a) > kUnitaryTolerance) {
      throw ValidationError("Jeandel base gate '" + label + "' is not unitary");
    }
    fam.labels.push_back(label);
    fam.base.push_back(involution_representative(a, label));
    fam.gates.push_back(jeandel_gate(fam.base.back(), k));
  }
  return fam;
}

/// Uses the supplied (not the appended adjoint) gates of a 2-qubit GateSet.
inline JeandelFamily build_family(const GateSet& omega, std::size_t k) {
  if (omega.d() != 2 || omega.n() != 2) {
    throw ValidationError("Jeandel base set must consist of 2-qubit gates (d=2, n=2)");
  }
  std::vector<LabeledMatrix> raw;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega.origins()[i].adjoint_of) continue;
    raw.push_back({omega.label(i), omega.gates()[i].matrix()});
  }
  return build_family(raw, k);
}

// ---------------------------------------------------------------------------
// Parity lemma

inline BigInt binomial(unsigned n, unsigned r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  BigInt b = 1;
  for (unsigned i = 1; i <= r; ++i) {
    b *= n - r + i;
    b /= i;
  }
  return b;
}

struct ParityRow {
  std::size_t q = 0;
  BigInt binom;
  bool odd = false;
};

/// Rows (q, binom(k+q, k)) for k = 2^j and q = 0..q_max.
inline std::vector<ParityRow> parity_lemma_check(std::size_t j, std::size_t q_max) {
  if (j > 20) throw ResourceError("parity check exponent j must be at most 20");
  const std::size_t k = std::size_t{1} << j;
  std::vector<ParityRow> rows;
  for (std::size_t q = 0; q <= q_max; ++q) {
    BigInt b = binomial(static_cast<unsigned>(k + q), static_cast<unsigned>(k));
    const bool odd = bit_test(b, 0);
    rows.push_back({q, std::move(b), odd});
  }
  return rows;
}

inline bool is_power_of_two(std::size_t k) { return k != 0 && (k & (k - 1)) == 0; }

// ---------------------------------------------------------------------------
// Compilation identity

struct CompileCheck {
  std::string label;
  bool ok = false;
  double defect = 0.0;   // Frobenius distance to A (x) I
  std::size_t factors = 0;
};

inline constexpr double kCompileTolerance = 1e-8;

namespace detail {

/// Lexicographic r-subsets of {lo, ..., hi}.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t lo, std::size_t hi, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t next) -> void {
    if (cur.size() == r) {
      out.push_back(cur);
      return;
    }
    for (std::size_t v = next; v <= hi; ++v) {
      if (hi - v + 1 < r - cur.size()) break;
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, lo);
  return out;
}

}  // namespace detail

/// On 2k+1 qubits, multiplies embed(B_k(A), [0,1] + S) over the k-subsets S
/// of {2..2k} in lexicographic order and compares with A on qubits 0,1.
inline std::vector<CompileCheck> compile_and_verify(
    const JeandelFamily& fam, std::size_t dense_threshold = 4096) {
  const std::size_t k = fam.k;
  const std::size_t N = 2 * k + 1;
  const std::size_t dim = checked_pow(2, N);
  if (dim > dense_threshold) {
    throw ResourceError(
        "compilation check on " + std::to_string(N) + " qubits (dimension " +
        std::to_string(dim) + ") exceeds the dense threshold " + std::to_string(dense_threshold));
  }
  const auto sets = detail::subsets(2, 2 * k, k);
  std::vector<CompileCheck> out;
  for (std::size_t i = 0; i < fam.gates.size(); ++i) {
    std::vector<Factor> factors;
    for (const auto& s : sets) {
      std::vector<std::size_t> targets{0, 1};
      targets.insert(targets.end(), s.begin(), s.end());
      factors.push_back(GateFactor{fam.gates[i], std::move(targets), false});
    }
    const Matrix product = TensorWordOperator(2, N, factors).dense(dense_threshold);
    const Matrix want = embed(fam.base[i], 2, {0, 1}, N).dense(dense_threshold);
    CompileCheck c;
    c.label = fam.labels[i];
    c.defect = (product - want).norm();
    c.ok = c.defect <= kCompileTolerance;
    c.factors = sets.size();
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant subspace on 2k-2 qubits

struct WitnessResult {
  bool holds = false;
  std::size_t N = 0;
  std::size_t subspace_dim = 0;
  std::size_t placements = 0;
  double max_defect = 0.0;
};

inline constexpr double kWitnessTolerance = 1e-10;

/// Checks that every placement of every (k+2)-qubit gate on N qubits fixes
/// each weight-(N/2) computational basis state. Gates are taken as given (no
/// unitarity requirement), so a perturbed gate can be tested.
inline WitnessResult invariance_witness(
    const std::vector<Matrix>& gates_in, std::size_t k, std::size_t N, double tolerance = kWitnessTolerance) {
  if (N < k + 2) {
    throw ValidationError(
        "witness register of " + std::to_string(N) + " qubits cannot hold a " +
        std::to_string(k + 2) + "-qubit gate");
  }
  if (N % 2 != 0) throw ValidationError("witness register size must be even");
  const std::size_t dim = checked_pow(2, N, 1 << 16);
  std::vector<std::size_t> balanced;
  for (std::size_t x = 0; x < dim; ++x) {
    if (static_cast<std::size_t>(std::popcount(x)) == N / 2) balanced.push_back(x);
  }
  // Ordered (k+2)-tuples of distinct qubits.
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (std::size_t depth = 0; depth < k + 2; ++depth) {
    std::vector<std::vector<std::size_t>> grown;
    for (const auto& t : tuples) {
      for (std::size_t q = 0; q < N; ++q) {
        if (std::find(t.begin(), t.end(), q) != t.end()) continue;
        auto u = t;
        u.push_back(q);
        grown.push_back(std::move(u));
      }
    }
    tuples = std::move(grown);
  }
  WitnessResult res;
  res.N = N;
  res.subspace_dim = balanced.size();
  std::vector<Complex> e(dim, Complex{0.0, 0.0}), out(dim);
  for (const auto& g : gates_in) {
    for (const auto& t : tuples) {
      const CompiledOperator op(TensorWordOperator(2, N, {GateFactor{g, t, false}}));
      ++res.placements;
      for (auto x : balanced) {
        e[x] = 1.0;
        op.apply(e, out);
        e[x] = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          sq += std::norm(out[i] - (i == x ? Complex{1.0, 0.0} : Complex{0.0, 0.0}));
        }
        res.max_defect = std::max(res.max_defect, std::sqrt(sq));
      }
    }
  }
  res.holds = res.max_defect <= tolerance;
  return res;
}

inline WitnessResult invariance_witness(const JeandelFamily& fam) {
  return invariance_witness(fam.gates, fam.k, 2 * fam.k - 2);
}

}  // namespace evuniv
