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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "evuniv/fixed_subspace.hpp"
#include "evuniv/gates.hpp"
#include "evuniv/tensor.hpp"
#include "oracles.hpp"

using namespace evuniv;

namespace {

Vector basis(std::size_t dim, std::size_t i) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

Matrix random_unitary(std::size_t m, std::mt19937_64& rng) { return oracle::haar(m, rng); }

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
  const auto r = kron(Unitary::identity(2), Unitary::identity(2));
  EXPECT_EQ(r.dim(), 4u);
  EXPECT_EQ(r.matrix(), Matrix::Identity(4, 4));
}

TEST(Kron, XOnLeadingQubit) {
  const auto x = Unitary::from_matrix(gates::X());
  const auto r = kron(x, Unitary::identity(2));
  // e0 (x) e0 -> e1 (x) e0 = index 2 (qudit 0 most significant)
  EXPECT_TRUE((r.matrix() * basis(4, 0)).isApprox(basis(4, 2)));
}

TEST(Kron, HadamardPairIsUnitary) {
  const auto h = Unitary::from_matrix(gates::H());
  const auto hh = kron(h, h);
  const Matrix g = hh.matrix().adjoint() * hh.matrix();
  EXPECT_LT((g - Matrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT(hh.unitarity_defect(), 1e-12);
}

TEST(Kron, MatchesPlainLoopsAndIsAssociative) {
  std::mt19937_64 rng(7);
  const Matrix a = random_unitary(2, rng), b = random_unitary(3, rng), c = random_unitary(2, rng);
  EXPECT_EQ(kron(a, b), oracle::kron(a, b));
  EXPECT_LT((kron(kron(a, b), c) - kron(a, kron(b, c))).norm(), 1e-14);
}

TEST(Kron, OverflowIsResourceError) {
  const auto big = Unitary::identity(2048);
  EXPECT_THROW(kron(big, big, 1 << 21), ResourceError);
}

TEST(Unitary, RejectsNonUnitary) {
  Matrix m = gates::X();
  m(0, 0) = 0.1;
  EXPECT_THROW(Unitary::from_matrix(m), ValidationError);
  EXPECT_THROW(Unitary::from_matrix(Matrix(2, 3)), ValidationError);
}

TEST(Permutation, IdentityOnThreeQubits) {
  const auto p = permutation_operator(QuditPermutation::identity(2, 3));
  EXPECT_EQ(p.matrix(), Matrix::Identity(8, 8));
}

TEST(Permutation, SwapMovesBasisState) {
  const auto p = permutation_operator(QuditPermutation::transposition(2, 2, 0, 1));
  // e0 (x) e1 = index 1 -> e1 (x) e0 = index 2
  EXPECT_EQ(p.matrix() * basis(4, 1), basis(4, 2));
  EXPECT_EQ(p.matrix(), gates::SWAP());
}

TEST(Permutation, QutritSwapIsInvolution) {
  const auto p = permutation_operator(QuditPermutation::transposition(3, 2, 0, 1));
  EXPECT_EQ(p.dim(), 9u);
  EXPECT_EQ(p.matrix() * p.matrix(), Matrix::Identity(9, 9));
}

TEST(Permutation, Homomorphism) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> a(4), b(4);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    const QuditPermutation s(3, a), t(3, b);
    const Matrix lhs = permutation_operator(s.compose(t)).matrix();
    const Matrix rhs = permutation_operator(s).matrix() * permutation_operator(t).matrix();
    EXPECT_EQ(lhs, rhs);
    EXPECT_EQ(permutation_operator(s.inverse()).matrix(), permutation_operator(s).matrix().adjoint());
  }
}

TEST(Permutation, MovesQuditPToPermP) {
  // Three qutrits, digits (0, 1, 2); sending qudit 0 -> 2, 1 -> 0, 2 -> 1
  // yields digits (1, 2, 0).
  const QuditPermutation p(3, {2, 0, 1});
  EXPECT_EQ(p.apply_to_index(0 * 9 + 1 * 3 + 2), 1u * 9 + 2 * 3 + 0);
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(QuditPermutation(2, {0, 0}), ValidationError);
  EXPECT_THROW(QuditPermutation(2, {0, 2}), ValidationError);
}

TEST(TensorWord, DenseMatchesFactorProduct) {
  std::mt19937_64 rng(11);
  const std::size_t d = 2, n = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g1 = random_unitary(4, rng);
    const Matrix g2 = random_unitary(2, rng);
    const QuditPermutation p(2, {1, 3, 0, 2});
    TensorWordOperator op(d, n);
    op.push(GateFactor{g1, {2, 0}, false});
    op.push(PermutationFactor{p.map()});
    op.push(GateFactor{g2, {3}, true});

    // Reference: explicit embeddings, applied in list order.
    // g1 on (2, 0): put qubits 2,0 in front via the permutation 2->0, 0->1, 1->2.
    const Matrix front = permutation_operator(QuditPermutation(2, {1, 2, 0, 3})).matrix();
    const Matrix e1 = front.adjoint() * oracle::kron(g1, Matrix::Identity(4, 4)) * front;
    const Matrix e2 = permutation_operator(p).matrix();
    const Matrix e3 = oracle::kron_all({Matrix::Identity(8, 8), g2.conjugate()});
    const Matrix want = e3 * e2 * e1;
    EXPECT_LT((op.dense() - want).norm(), 1e-10);

    const Vector v = detail::random_vector(16, rng);
    EXPECT_LT((op.apply(v) - want * v).norm(), 1e-10);
    EXPECT_LT((op.inverse().dense() - want.adjoint()).norm(), 1e-10);
  }
}

TEST(TensorWord, DenseMatchesOnQutritsUpTo256) {
  std::mt19937_64 rng(5);
  // d = 4, three qudits: dim 64; d = 2, eight qubits: dim 256.
  for (auto [d, n] : {std::pair<std::size_t, std::size_t>{4, 3}, {2, 8}}) {
    const Matrix g = random_unitary(d * d, rng);
    TensorWordOperator op(d, n, {GateFactor{g, {n - 1, 0}, false}});
    const std::size_t dim = checked_pow(d, n);
    const Matrix front = permutation_operator(QuditPermutation(d, [&] {
                           std::vector<std::size_t> p(n);
                           // n-1 -> 0, 0 -> 1, others shift right by one
                           p[n - 1] = 0;
                           p[0] = 1;
                           for (std::size_t q = 1; q + 1 < n; ++q) p[q] = q + 1;
                           return p;
                         }())).matrix();
    const Matrix want = front.adjoint() * oracle::kron(g, Matrix::Identity(dim / (d * d), dim / (d * d))) * front;
    EXPECT_LT((op.dense(dim) - want).norm(), 1e-10);
  }
}

TEST(TensorWord, ValidatesTargets) {
  EXPECT_THROW(TensorWordOperator(2, 2, {GateFactor{gates::CZ(), {0, 0}, false}}), ValidationError);
  EXPECT_THROW(TensorWordOperator(2, 2, {GateFactor{gates::CZ(), {0, 2}, false}}), ValidationError);
  EXPECT_THROW(TensorWordOperator(2, 2, {GateFactor{gates::X(), {0, 1}, false}}), ValidationError);
  EXPECT_THROW(TensorWordOperator(2, 30), ResourceError);
}

TEST(TensorWord, BasisPermutationDetection) {
  TensorWordOperator op(2, 3, {GateFactor{gates::CNOT(), {2, 0}, false},
                               PermutationFactor{{1, 2, 0}}});
  const auto p = op.basis_permutation();
  ASSERT_TRUE(p.has_value());
  const Matrix dense = op.dense();
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(dense((*p)[i], i), Complex(1.0, 0.0));
  TensorWordOperator h(2, 1, {GateFactor{gates::H(), {0}, false}});
  EXPECT_FALSE(h.basis_permutation().has_value());
  TensorWordOperator z(2, 1, {GateFactor{gates::Z(), {0}, false}});
  EXPECT_FALSE(z.basis_permutation().has_value());
}

TEST(TensorWord, PerturbedIdentityRowIsApplied) {
  // A non-unitary tweak inside an identity column must not be skipped.
  Matrix g = Matrix::Identity(4, 4);
  g(2, 1) = 1e-3;
  TensorWordOperator op(2, 2, {GateFactor{g, {0, 1}, false}});
  EXPECT_LT((op.dense() - g).norm(), 1e-15);
}

TEST(CanonicalPhase, RemovesGlobalPhase) {
  std::mt19937_64 rng(9);
  const Matrix u = random_unitary(4, rng);
  const Matrix a = canonical_phase(u);
  const Matrix b = canonical_phase(u * std::polar(1.0, 1.234));
  EXPECT_LT((a - b).norm(), 1e-12);
  EXPECT_EQ(canonical_phase(gates::X() * Complex(0, 1)), gates::X());
}
