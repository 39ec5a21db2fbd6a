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

// Dense and tensor-structured linear algebra on qudit registers.
//
// Ordering convention used everywhere in the library: in a register of N
// qudits of local dimension d, qudit 0 is the most significant base-d digit
// of a basis index, so kron(a, b) places `a` on the leading qudits.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evuniv/errors.hpp"

namespace evuniv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest total dimension any constructed operator may have.
inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 21;
inline constexpr double kUnitaryTolerance = 1e-10;

/// base^exp, throwing ResourceError once the result exceeds `limit`.
inline std::size_t checked_pow(
    std::size_t base, std::size_t exp, std::size_t limit = kDefaultMaxDim) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base) {
      throw ResourceError(
          "dimension " + std::to_string(base) + "^" + std::to_string(exp) +
          " exceeds limit " + std::to_string(limit));
    }
    r *= base;
  }
  if (r > limit) {
    throw ResourceError(
        "dimension " + std::to_string(r) + " exceeds limit " +
        std::to_string(limit));
  }
  return r;
}

/// Frobenius norm of U^dagger U - I.
inline double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

/// Multiplies `u` by the unit phase that makes its largest-modulus entry
/// (first one in column-major order, with a small tie margin) real positive.
/// Two matrices equal up to a global phase map to the same representative
/// unless their largest entries tie within the margin.
inline Matrix canonical_phase(const Matrix& u) {
  double best = -1.0;
  Complex pivot{1.0, 0.0};
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, j));
      if (a > best + 1e-9) {
        best = a;
        pivot = u(i, j);
      }
    }
  }
  if (best <= 0.0) return u;
  return u * (std::abs(pivot) / pivot);
}

/// Dense complex square matrix that was unitary within tolerance when built.
class Unitary {
 public:
  static Unitary from_matrix(Matrix m, double tolerance = kUnitaryTolerance) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw ValidationError(
          "unitary must be a non-empty square matrix, got " +
          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const double defect = evuniv::unitarity_defect(m);
    if (!(defect <= tolerance)) {
      throw ValidationError(
          "matrix is not unitary: defect " + std::to_string(defect) +
          " exceeds tolerance " + std::to_string(tolerance));
    }
    return Unitary(std::move(m), defect);
  }

  static Unitary identity(std::size_t dim) {
    return Unitary(Matrix::Identity(dim, dim), 0.0);
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double unitarity_defect() const { return defect_; }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  Unitary adjoint() const { return Unitary(m_.adjoint(), defect_); }
  Unitary conjugate() const { return Unitary(m_.conjugate(), defect_); }
  Unitary scaled(Complex phase) const { return Unitary(m_ * phase, defect_); }

  Unitary operator*(const Unitary& other) const {
    if (other.dim() != dim()) throw ValidationError("unitary dimension mismatch");
    Matrix p = m_ * other.m_;
    const double defect = evuniv::unitarity_defect(p);
    return Unitary(std::move(p), defect);
  }

 private:
  Unitary(Matrix m, double defect) : m_(std::move(m)), defect_(defect) {}

  Matrix m_;
  double defect_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

inline Unitary kron(
    const Unitary& a, const Unitary& b, std::size_t max_dim = kDefaultMaxDim) {
  if (a.dim() > max_dim / b.dim()) {
    throw ResourceError(
        "kron dimension " + std::to_string(a.dim()) + "*" +
        std::to_string(b.dim()) + " exceeds limit " + std::to_string(max_dim));
  }
  Matrix r = kron(a.matrix(), b.matrix());
  return Unitary::from_matrix(std::move(r), 1e-8);
}

/// A bijection of qudit positions. The induced operator moves the qudit at
/// position p to position perm[p], i.e.
/// P(e_{i_0} x ... x e_{i_{N-1}}) = e_{i_{s^-1(0)}} x ... x e_{i_{s^-1(N-1)}}.
class QuditPermutation {
 public:
  QuditPermutation(std::size_t d, std::vector<std::size_t> perm)
      : d_(d), perm_(std::move(perm)) {
    if (d_ < 1) throw ValidationError("local dimension must be positive");
    std::vector<bool> seen(perm_.size(), false);
    for (auto p : perm_) {
      if (p >= perm_.size() || seen[p]) {
        throw ValidationError("qudit permutation is not a bijection");
      }
      seen[p] = true;
    }
  }

  static QuditPermutation identity(std::size_t d, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return {d, std::move(p)};
  }

  static QuditPermutation transposition(
      std::size_t d, std::size_t n, std::size_t i, std::size_t j) {
    auto p = identity(d, n).perm_;
    if (i >= n || j >= n) throw ValidationError("transposition index out of range");
    std::swap(p[i], p[j]);
    return {d, std::move(p)};
  }

  std::size_t d() const { return d_; }
  std::size_t size() const { return perm_.size(); }
  const std::vector<std::size_t>& map() const { return perm_; }
  std::size_t operator[](std::size_t p) const { return perm_[p]; }

  /// (this o other)(p) = this(other(p)).
  QuditPermutation compose(const QuditPermutation& other) const {
    if (other.size() != size()) throw ValidationError("permutation size mismatch");
    std::vector<std::size_t> r(size());
    for (std::size_t p = 0; p < size(); ++p) r[p] = perm_[other.perm_[p]];
    return {d_, std::move(r)};
  }

  QuditPermutation inverse() const {
    std::vector<std::size_t> r(size());
    for (std::size_t p = 0; p < size(); ++p) r[perm_[p]] = p;
    return {d_, std::move(r)};
  }

  bool is_identity() const {
    for (std::size_t p = 0; p < size(); ++p) {
      if (perm_[p] != p) return false;
    }
    return true;
  }

  /// Basis index of P e_index.
  std::size_t apply_to_index(std::size_t index) const {
    const std::size_t n = size();
    std::size_t out = 0;
    std::vector<std::size_t> digits(n);
    for (std::size_t p = n; p-- > 0;) {
      digits[p] = index % d_;
      index /= d_;
    }
    std::vector<std::size_t> placed(n);
    for (std::size_t p = 0; p < n; ++p) placed[perm_[p]] = digits[p];
    for (std::size_t p = 0; p < n; ++p) out = out * d_ + placed[p];
    return out;
  }

  friend bool operator==(const QuditPermutation&, const QuditPermutation&) = default;

 private:
  std::size_t d_;
  std::vector<std::size_t> perm_;
};

inline Unitary permutation_operator(
    const QuditPermutation& p, std::size_t max_dim = kDefaultMaxDim) {
  const std::size_t dim = checked_pow(p.d(), p.size(), max_dim);
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(p.apply_to_index(i), i) = 1.0;
  return Unitary::from_matrix(std::move(m), 0.0);
}

// ---------------------------------------------------------------------------
// Tensor-structured operators

/// A small unitary acting on the listed qudits (in listed order, first
/// target = most significant local digit). When `conjugated` is set the
/// factor applies the entrywise complex conjugate of `matrix`.
struct GateFactor {
  Matrix matrix;
  std::vector<std::size_t> targets;
  bool conjugated = false;

  Matrix effective() const { return conjugated ? Matrix(matrix.conjugate()) : matrix; }
};

/// Reindexes the whole register; see QuditPermutation.
struct PermutationFactor {
  std::vector<std::size_t> perm;
};

using Factor = std::variant<GateFactor, PermutationFactor>;

/// Product of gate and permutation factors on a register of `qudits` qudits
/// of local dimension `d`. Factors are applied in list order, so the operator
/// equals factors.back() * ... * factors.front().
class TensorWordOperator {
 public:
  TensorWordOperator(
      std::size_t d, std::size_t qudits, std::vector<Factor> factors = {},
      std::size_t max_dim = kDefaultMaxDim)
      : d_(d), qudits_(qudits), dim_(checked_pow(d, qudits, max_dim)),
        factors_(std::move(factors)) {
    for (const auto& f : factors_) validate(f);
  }

  std::size_t d() const { return d_; }
  std::size_t qudits() const { return qudits_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Factor>& factors() const { return factors_; }

  TensorWordOperator& push(Factor f) {
    validate(f);
    factors_.push_back(std::move(f));
    return *this;
  }

  /// Operator applying `this` first, then `next`.
  TensorWordOperator then(const TensorWordOperator& next) const {
    if (next.d_ != d_ || next.qudits_ != qudits_) {
      throw ValidationError("cannot compose operators on different registers");
    }
    TensorWordOperator r = *this;
    r.factors_.insert(r.factors_.end(), next.factors_.begin(), next.factors_.end());
    return r;
  }

  TensorWordOperator inverse() const {
    std::vector<Factor> inv;
    inv.reserve(factors_.size());
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
      if (const auto* g = std::get_if<GateFactor>(&*it)) {
        inv.push_back(GateFactor{g->matrix.adjoint(), g->targets, g->conjugated});
      } else {
        const auto& p = std::get<PermutationFactor>(*it).perm;
        std::vector<std::size_t> q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = i;
        inv.push_back(PermutationFactor{std::move(q)});
      }
    }
    return TensorWordOperator(d_, qudits_, std::move(inv));
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const;

  Vector apply(const Vector& in) const {
    Vector out(in.size());
    apply(std::span<const Complex>(in.data(), in.size()),
          std::span<Complex>(out.data(), out.size()));
    return out;
  }

  /// Assembles the dense matrix column by column.
  Matrix dense(std::size_t max_dim = 4096) const;

  /// Basis map i -> j with op(e_i) = e_j when every factor is an exact
  /// permutation of basis states; std::nullopt otherwise.
  std::optional<std::vector<std::uint32_t>> basis_permutation(
      double tolerance = 1e-13) const;

 private:
  void validate(const Factor& f) const {
    if (const auto* g = std::get_if<GateFactor>(&f)) {
      std::vector<bool> used(qudits_, false);
      for (auto t : g->targets) {
        if (t >= qudits_) throw ValidationError("gate target out of range");
        if (used[t]) throw ValidationError("duplicate gate target");
        used[t] = true;
      }
      const std::size_t local = checked_pow(d_, g->targets.size());
      if (static_cast<std::size_t>(g->matrix.rows()) != local ||
          static_cast<std::size_t>(g->matrix.cols()) != local) {
        throw ValidationError(
            "gate factor of size " + std::to_string(g->matrix.rows()) +
            " does not match " + std::to_string(g->targets.size()) +
            " target qudits of dimension " + std::to_string(d_));
      }
    } else {
      const auto& p = std::get<PermutationFactor>(f).perm;
      if (p.size() != qudits_) throw ValidationError("permutation factor size mismatch");
      QuditPermutation check(d_, p);
      (void)check;
    }
  }

  std::size_t d_;
  std::size_t qudits_;
  std::size_t dim_;
  std::vector<Factor> factors_;
};

/// Precomputed index tables for fast repeated application of a
/// TensorWordOperator. Gate matrices are stored row-sparse, so permutation-
/// like and controlled gates cost proportionally to their nonzeros.
class CompiledOperator {
 public:
  /// Gate rows within this distance of a unit row are treated as identity.
  static constexpr double kIdentityRowTolerance = 1e-14;

  explicit CompiledOperator(const TensorWordOperator& op)
      : dim_(op.dim()) {
    const std::size_t d = op.d();
    const std::size_t n = op.qudits();
    std::vector<std::size_t> stride(n);
    for (std::size_t q = 0; q < n; ++q) stride[q] = checked_pow(d, n - 1 - q);
    for (const auto& f : op.factors()) {
      if (const auto* g = std::get_if<GateFactor>(&f)) {
        kernels_.push_back(make_gate(*g, d, n, stride));
      } else {
        const auto& perm = std::get<PermutationFactor>(f).perm;
        PermKernel k;
        k.map.resize(dim_);
        QuditPermutation qp(d, perm);
        fill_perm_map(qp, d, n, stride, k.map);
        kernels_.push_back(std::move(k));
      }
    }
  }

  std::size_t dim() const { return dim_; }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != dim_ || out.size() != dim_) {
      throw ValidationError("operator applied to vector of wrong size");
    }
    std::copy(in.begin(), in.end(), out.begin());
    std::vector<Complex> scratch;
    std::vector<Complex> gathered;
    std::vector<Complex> result;
    for (const auto& kernel : kernels_) {
      if (const auto* g = std::get_if<GateKernel>(&kernel)) {
        apply_gate(*g, out, gathered, result);
      } else {
        const auto& map = std::get<PermKernel>(kernel).map;
        scratch.resize(dim_);
        for (std::size_t i = 0; i < dim_; ++i) scratch[map[i]] = out[i];
        std::copy(scratch.begin(), scratch.end(), out.begin());
      }
    }
  }

 private:
  // Only rows that differ from the identity are recomputed; `gather` lists
  // the local columns those rows read.
  struct GateKernel {
    std::vector<std::size_t> bases;         // global indices with target digits 0
    std::vector<std::size_t> gather;        // global offsets of columns read
    std::vector<std::size_t> write;         // global offsets of active rows
    std::vector<std::size_t> row_start;     // CSR over active rows
    std::vector<std::size_t> cols;          // positions in `gather`
    std::vector<Complex> vals;
  };
  struct PermKernel {
    std::vector<std::uint32_t> map;
  };
  using Kernel = std::variant<GateKernel, PermKernel>;

  static GateKernel make_gate(
      const GateFactor& g, std::size_t d, std::size_t n,
      const std::vector<std::size_t>& stride) {
    GateKernel k;
    const Matrix m = g.effective();
    const std::size_t t = g.targets.size();
    std::vector<std::size_t> offsets(static_cast<std::size_t>(m.rows()), 0);
    for (std::size_t l = 0; l < offsets.size(); ++l) {
      std::size_t rest = l;
      std::size_t off = 0;
      for (std::size_t j = t; j-- > 0;) {
        off += (rest % d) * stride[g.targets[j]];
        rest /= d;
      }
      offsets[l] = off;
    }
    std::vector<std::size_t> free_strides;
    std::vector<bool> is_target(n, false);
    for (auto q : g.targets) is_target[q] = true;
    for (std::size_t q = 0; q < n; ++q) {
      if (!is_target[q]) free_strides.push_back(stride[q]);
    }
    std::size_t nbases = 1;
    for (std::size_t i = 0; i < free_strides.size(); ++i) nbases *= d;
    k.bases.reserve(nbases);
    std::vector<std::size_t> digit(free_strides.size(), 0);
    for (std::size_t b = 0; b < nbases; ++b) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < digit.size(); ++i) idx += digit[i] * free_strides[i];
      k.bases.push_back(idx);
      for (std::size_t i = digit.size(); i-- > 0;) {
        if (++digit[i] < d) break;
        digit[i] = 0;
      }
    }
    const std::size_t local = static_cast<std::size_t>(m.rows());
    std::vector<std::size_t> slot(local, local);
    k.row_start.push_back(0);
    for (std::size_t r = 0; r < local; ++r) {
      bool unit_row = true;
      for (std::size_t c = 0; c < local && unit_row; ++c) {
        const Complex want = r == c ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
        if (std::abs(m(r, c) - want) > kIdentityRowTolerance) unit_row = false;
      }
      if (unit_row) continue;
      k.write.push_back(offsets[r]);
      for (std::size_t c = 0; c < local; ++c) {
        if (m(r, c) == Complex{0.0, 0.0}) continue;
        if (slot[c] == local) {
          slot[c] = k.gather.size();
          k.gather.push_back(offsets[c]);
        }
        k.cols.push_back(slot[c]);
        k.vals.push_back(m(r, c));
      }
      k.row_start.push_back(k.cols.size());
    }
    return k;
  }

  static void fill_perm_map(
      const QuditPermutation& p, std::size_t d, std::size_t n,
      const std::vector<std::size_t>& stride, std::vector<std::uint32_t>& map) {
    std::vector<std::size_t> digits(n);
    for (std::size_t i = 0; i < map.size(); ++i) {
      std::size_t rest = i;
      for (std::size_t q = n; q-- > 0;) {
        digits[q] = rest % d;
        rest /= d;
      }
      std::size_t out = 0;
      for (std::size_t q = 0; q < n; ++q) out += digits[q] * stride[p[q]];
      map[i] = static_cast<std::uint32_t>(out);
    }
  }

  static void apply_gate(
      const GateKernel& k, std::span<Complex> v, std::vector<Complex>& x,
      std::vector<Complex>& y) {
    if (k.write.empty()) return;
    x.resize(k.gather.size());
    y.resize(k.write.size());
    for (const auto base : k.bases) {
      for (std::size_t l = 0; l < k.gather.size(); ++l) x[l] = v[base + k.gather[l]];
      for (std::size_t r = 0; r < k.write.size(); ++r) {
        Complex acc{0.0, 0.0};
        for (std::size_t e = k.row_start[r]; e < k.row_start[r + 1]; ++e) {
          acc += k.vals[e] * x[k.cols[e]];
        }
        y[r] = acc;
      }
      for (std::size_t r = 0; r < k.write.size(); ++r) v[base + k.write[r]] = y[r];
    }
  }

  std::size_t dim_;
  std::vector<Kernel> kernels_;
};

inline void TensorWordOperator::apply(
    std::span<const Complex> in, std::span<Complex> out) const {
  CompiledOperator(*this).apply(in, out);
}

inline Matrix TensorWordOperator::dense(std::size_t max_dim) const {
  if (dim_ > max_dim) {
    throw ResourceError(
        "dense assembly of dimension " + std::to_string(dim_) +
        " exceeds limit " + std::to_string(max_dim));
  }
  CompiledOperator c(*this);
  Matrix m(dim_, dim_);
  std::vector<Complex> e(dim_, Complex{0.0, 0.0});
  std::vector<Complex> col(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    e[j] = 1.0;
    c.apply(e, col);
    for (std::size_t i = 0; i < dim_; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

namespace detail {

/// Column permutation of a 0/1 matrix; nullopt if not a permutation matrix.
inline std::optional<std::vector<std::size_t>> permutation_pattern(
    const Matrix& m, double tolerance) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::size_t> image(n, n);
  std::vector<bool> hit(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Complex z = m(i, j);
      if (std::abs(z - Complex{1.0, 0.0}) <= tolerance) {
        if (image[j] != n || hit[i]) return std::nullopt;
        image[j] = i;
        hit[i] = true;
      } else if (std::abs(z) > tolerance) {
        return std::nullopt;
      }
    }
    if (image[j] == n) return std::nullopt;
  }
  return image;
}

}  // namespace detail

inline std::optional<std::vector<std::uint32_t>>
TensorWordOperator::basis_permutation(double tolerance) const {
  // Rewrite every gate factor as its local basis permutation first.
  std::vector<std::vector<std::size_t>> local_maps;
  for (const auto& f : factors_) {
    if (const auto* g = std::get_if<GateFactor>(&f)) {
      auto pat = detail::permutation_pattern(g->effective(), tolerance);
      if (!pat) return std::nullopt;
      local_maps.push_back(std::move(*pat));
    }
  }
  std::vector<std::size_t> stride(qudits_);
  for (std::size_t q = 0; q < qudits_; ++q) stride[q] = checked_pow(d_, qudits_ - 1 - q);
  std::vector<std::uint32_t> map(dim_);
  std::iota(map.begin(), map.end(), std::uint32_t{0});
  std::vector<std::size_t> digits(qudits_);
  std::size_t gate_index = 0;
  for (const auto& f : factors_) {
    if (const auto* g = std::get_if<GateFactor>(&f)) {
      const auto& local = local_maps[gate_index++];
      for (auto& idx : map) {
        std::size_t l = 0;
        for (auto t : g->targets) l = l * d_ + (idx / stride[t]) % d_;
        std::size_t image = local[l];
        std::size_t out = idx;
        for (std::size_t j = g->targets.size(); j-- > 0;) {
          const std::size_t t = g->targets[j];
          const std::size_t old_digit = (idx / stride[t]) % d_;
          out = out - old_digit * stride[t] + (image % d_) * stride[t];
          image /= d_;
        }
        idx = static_cast<std::uint32_t>(out);
      }
    } else {
      const QuditPermutation p(d_, std::get<PermutationFactor>(f).perm);
      for (auto& idx : map) {
        std::size_t rest = idx;
        for (std::size_t q = qudits_; q-- > 0;) {
          digits[q] = rest % d_;
          rest /= d_;
        }
        std::size_t out = 0;
        for (std::size_t q = 0; q < qudits_; ++q) out += digits[q] * stride[p[q]];
        idx = static_cast<std::uint32_t>(out);
      }
    }
  }
  return map;
}

}  // namespace evuniv
