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

// Bounded exhaustive searches over exact integers.
//
//   lie-type   d^N = (3^k - 1)/2, (3^k + 1)/2 or (2^k - (-1)^k)/3
//   repunit    y^q = (x^n - 1)/(x - 1)  or  y^q = (x^n + 1)/(x + 1), n odd
//   cohn       y^2 = 2 z^k - 1, k >= 3
//
// Every reported tuple is checked by exact substitution. Floating point is
// only used to guess integer roots, and each guess is confirmed (or its
// neighbours tried) in exact arithmetic. A search finding nothing is
// evidence within its bounds, not a proof.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "evuniv/errors.hpp"

namespace evuniv {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline BigInt big_pow(const BigInt& b, std::size_t e) {
  return boost::multiprecision::pow(b, static_cast<unsigned>(e));
}

/// Natural log of a positive big integer.
inline double big_log(const BigInt& v) {
  const std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 60) return std::log(static_cast<double>(static_cast<std::uint64_t>(v)));
  const std::size_t shift = bits - 60;
  const BigInt top = v >> shift;
  return std::log(static_cast<double>(static_cast<std::uint64_t>(top))) +
         static_cast<double>(shift) * std::log(2.0);
}

/// r with r^n == v, if any (v >= 1, n >= 1).
inline std::optional<BigInt> exact_root(const BigInt& v, std::size_t n) {
  if (v < 1 || n == 0) return std::nullopt;
  if (n == 1) return v;
  if (v == 1) return BigInt(1);
  if (n == 2) {
    BigInt r = boost::multiprecision::sqrt(v);
    if (r * r == v) return r;
    return std::nullopt;
  }
  if (boost::multiprecision::msb(v) + 1 < n) return std::nullopt;  // v < 2^n
  const double guess = std::exp(big_log(v) / static_cast<double>(n));
  if (guess < 9.0e15) {
    const auto g = static_cast<std::int64_t>(std::llround(guess));
    for (std::int64_t r = std::max<std::int64_t>(1, g - 1); r <= g + 1; ++r) {
      const BigInt p = big_pow(BigInt(r), n);
      if (p == v) return BigInt(r);
    }
    return std::nullopt;
  }
  // Large roots: binary search.
  BigInt lo = 1, hi = BigInt(1) << (boost::multiprecision::msb(v) / n + 2);
  while (lo < hi) {
    const BigInt mid = (lo + hi) / 2;
    if (big_pow(mid, n) < v) lo = mid + 1; else hi = mid;
  }
  if (big_pow(lo, n) == v) return lo;
  return std::nullopt;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = mulmod(r, b, p);
    b = mulmod(b, b, p);
    e >>= 1;
  }
  return r;
}

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lie-type dimensions

enum class LieEquation { ThreeMinus, ThreePlus, TwoAlt };

inline const char* to_string(LieEquation e) {
  switch (e) {
    case LieEquation::ThreeMinus: return "ThreeMinus";
    case LieEquation::ThreePlus: return "ThreePlus";
    case LieEquation::TwoAlt: return "TwoAlt";
  }
  return "?";
}

/// (3^k - 1)/2, (3^k + 1)/2 or (2^k - (-1)^k)/3.
inline BigInt lie_type_value(LieEquation e, std::size_t k) {
  switch (e) {
    case LieEquation::ThreeMinus: return (detail::big_pow(3, k) - 1) / 2;
    case LieEquation::ThreePlus: return (detail::big_pow(3, k) + 1) / 2;
    case LieEquation::TwoAlt:
      return (detail::big_pow(2, k) + (k % 2 == 1 ? 1 : -1)) / 3;
  }
  return 0;
}

struct DiophSolution {
  LieEquation equation = LieEquation::ThreeMinus;
  std::size_t d = 0;
  std::size_t N = 0;
  std::size_t k = 0;
  friend bool operator==(const DiophSolution&, const DiophSolution&) = default;
};

/// Every (d, N, k) with 2 <= d <= d_max, 2 <= N <= N_max, 1 <= k <= k_max and
/// d^N equal to one of the three values, ordered by equation, k, N.
inline std::vector<DiophSolution> scan_lie_type(
    std::size_t d_max = 1000, std::size_t N_max = 40, std::size_t k_max = 200) {
  std::vector<DiophSolution> out;
  for (auto e : {LieEquation::ThreeMinus, LieEquation::ThreePlus, LieEquation::TwoAlt}) {
    for (std::size_t k = 1; k <= k_max; ++k) {
      const BigInt v = lie_type_value(e, k);
      if (v < 4) continue;
      for (std::size_t N = 2; N <= N_max; ++N) {
        const auto r = detail::exact_root(v, N);
        if (!r || *r < 2 || *r > d_max) continue;
        if (detail::big_pow(*r, N) != v) continue;
        out.push_back({e, static_cast<std::size_t>(*r), N, k});
      }
    }
  }
  return out;
}

/// True when m is one of the three Lie-type values for some k.
inline bool is_lie_type_dimension(std::size_t m) {
  for (auto e : {LieEquation::ThreeMinus, LieEquation::ThreePlus, LieEquation::TwoAlt}) {
    for (std::size_t k = 1;; ++k) {
      const BigInt v = lie_type_value(e, k);
      if (v == m) return true;
      if (v > m) break;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Repunit-type equations

enum class RepunitSign { Minus, Plus };

struct RepunitSolution {
  std::size_t x = 0;
  BigInt y;
  std::size_t n = 0;
  std::size_t q = 0;
  friend bool operator==(const RepunitSolution&, const RepunitSolution&) = default;
};

struct RepunitBounds {
  std::size_t x_max = 10000;
  std::size_t n_min = 3;
  std::size_t n_max = 30;
  std::size_t q_max = 30;
  /// Primes p = 1 mod q used to reject non-q-th-power residues before the
  /// exact check.
  std::size_t filter_primes = 8;
};

namespace detail {

/// q-th power residue tables modulo a few primes p = 1 (mod q).
struct PowerResidueFilter {
  std::vector<std::uint32_t> primes;
  std::vector<std::vector<bool>> is_power;  // indexed by residue

  PowerResidueFilter(std::size_t q, std::size_t count) {
    for (std::uint32_t p = static_cast<std::uint32_t>(q) + 1; primes.size() < count && p < 200000; p += static_cast<std::uint32_t>(q)) {
      if (!is_prime_u64(p)) continue;
      std::vector<bool> tab(p, false);
      for (std::uint64_t r = 0; r < p; ++r) tab[powmod(r, q, p)] = true;
      primes.push_back(p);
      is_power.push_back(std::move(tab));
    }
  }
};

}  // namespace detail

/// Solutions of y^q = (x^n - 1)/(x - 1) (Minus) or y^q = (x^n + 1)/(x + 1)
/// (Plus, odd n only) with 2 <= x <= x_max, n_min <= n <= n_max,
/// 2 <= q <= q_max and y > 1. Sorted by x, n, q.
inline std::vector<RepunitSolution> scan_repunit(RepunitSign sign, const RepunitBounds& b = {}) {
  std::vector<detail::PowerResidueFilter> filters;
  for (std::size_t q = 0; q <= b.q_max; ++q) {
    filters.emplace_back(q < 2 ? 1 : q, q < 2 ? 0 : b.filter_primes);
  }
  std::vector<RepunitSolution> out;
  const bool plus = sign == RepunitSign::Plus;
  for (std::size_t x = 2; x <= b.x_max; ++x) {
    // S_n = sum_{i<n} base^i with base = x or -x; S_n is the quotient above.
    std::vector<std::vector<std::uint64_t>> residue(b.q_max + 1);
    std::vector<std::vector<std::uint64_t>> base_mod(b.q_max + 1);
    for (std::size_t q = 2; q <= b.q_max; ++q) {
      for (auto p : filters[q].primes) {
        residue[q].push_back(0);
        base_mod[q].push_back(plus ? (p - x % p) % p : x % p);
      }
    }
    BigInt s = 0;
    const BigInt base = plus ? BigInt(-static_cast<long long>(x)) : BigInt(x);
    const double log2x = std::log2(static_cast<double>(x));
    for (std::size_t n = 1; n <= b.n_max; ++n) {
      s = s * base + 1;
      for (std::size_t q = 2; q <= b.q_max; ++q) {
        for (std::size_t i = 0; i < residue[q].size(); ++i) {
          const auto p = filters[q].primes[i];
          residue[q][i] = (residue[q][i] * base_mod[q][i] + 1) % p;  // p < 2^18
        }
      }
      if (n < b.n_min || n < 2 || (plus && n % 2 == 0)) continue;
      const double log2s = static_cast<double>(n - 1) * log2x;
      for (std::size_t q = 2; q <= b.q_max; ++q) {
        if (static_cast<double>(q) > log2s + 1.0) break;  // y >= 2 needs s >= 2^q
        bool candidate = true;
        for (std::size_t i = 0; i < residue[q].size() && candidate; ++i) {
          candidate = filters[q].is_power[i][residue[q][i]];
        }
        if (!candidate) continue;
        const auto y = detail::exact_root(s, q);
        if (!y || *y < 2) continue;
        if (detail::big_pow(*y, q) != s) continue;
        out.push_back({x, *y, n, q});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// y^2 = 2 z^k - 1

struct CohnSolution {
  BigInt y;
  std::size_t z = 0;
  std::size_t k = 0;
  friend bool operator==(const CohnSolution&, const CohnSolution&) = default;
};

/// All (y, z, k) with 1 <= y <= y_max, 1 <= z <= z_max, 3 <= k <= k_max and
/// y^2 = 2 z^k - 1. Sorted by z, k.
inline std::vector<CohnSolution> scan_cohn(
    const BigInt& y_max = BigInt(1000000000), std::size_t z_max = 100000, std::size_t k_max = 64) {
  std::vector<CohnSolution> out;
  const BigInt v_max = y_max * y_max;
  for (std::size_t z = 1; z <= z_max; ++z) {
    BigInt zk = detail::big_pow(BigInt(z), 3);
    for (std::size_t k = 3; k <= k_max; ++k, zk *= z) {
      const BigInt v = 2 * zk - 1;
      if (v > v_max) break;
      const auto y = detail::exact_root(v, 2);
      if (y && *y <= y_max) out.push_back({*y, z, k});
    }
  }
  return out;
}

}  // namespace evuniv
