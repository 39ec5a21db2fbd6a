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

#include <cmath>
#include <numbers>

#include "evuniv/tensor.hpp"

namespace evuniv::gates {

inline Matrix identity(std::size_t dim) { return Matrix::Identity(dim, dim); }

inline Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix Y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix H() {
  const double s = 1.0 / std::numbers::sqrt2;
  Matrix m(2, 2);
  m << s, s, s, -s;
  return m;
}

inline Matrix S() {
  Matrix m(2, 2);
  m << 1, 0, 0, Complex(0, 1);
  return m;
}

inline Matrix T() {
  Matrix m(2, 2);
  m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4);
  return m;
}

/// Single-qubit involution (X + Y + Z)/sqrt(3): a pi rotation about the
/// (1,1,1) axis. Complex-valued and outside the Clifford group.
inline Matrix V() { return (X() + Y() + Z()) / std::sqrt(3.0); }

/// |0><0| x I + |1><1| x u on (control, target).
inline Matrix controlled(const Matrix& u) {
  const auto k = u.rows();
  Matrix m = Matrix::Identity(2 * k, 2 * k);
  m.bottomRightCorner(k, k) = u;
  return m;
}

inline Matrix CZ() { return controlled(Z()); }
inline Matrix CNOT() { return controlled(X()); }
inline Matrix CH() { return controlled(H()); }

inline Matrix SWAP() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return m;
}

/// Generalized Pauli shift |j> -> |j+1 mod d>.
inline Matrix weyl_shift(std::size_t d) {
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < d; ++j) m((j + 1) % d, j) = 1;
  return m;
}

/// Generalized Pauli clock |j> -> w^j |j>, w = exp(2 pi i / d).
inline Matrix weyl_clock(std::size_t d) {
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
  }
  return m;
}

}  // namespace evuniv::gates
