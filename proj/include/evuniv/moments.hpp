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

// Moments M_2k(G) = Haar average over G of |tr g|^2k for the group G generated
// by a GeneratorFamily.
//
// The exact value is the dimension of the subspace of (C^m)^{(x)2k} fixed by
// every (g (x) conj(g))^{(x)k}. A vector fixed by all generators is fixed by
// every word in them and, by continuity, by the closure of the group, so the
// generators alone determine the number.

#include <Eigen/QR>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "evuniv/errors.hpp"
#include "evuniv/fixed_subspace.hpp"
#include "evuniv/gateset.hpp"
#include "evuniv/tensor.hpp"

namespace evuniv {

enum class MomentMethod { Dense, MatrixFree, MonteCarlo };

inline const char* to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::Dense: return "Dense";
    case MomentMethod::MatrixFree: return "MatrixFree";
    case MomentMethod::MonteCarlo: return "MonteCarlo";
  }
  return "?";
}

struct MomentReport {
  std::size_t N = 0;
  /// Half order: k = 2 gives M_4, k = 4 gives M_8.
  std::size_t k = 2;
  /// Dimension m = d^N of the register.
  std::size_t register_dim = 0;
  std::optional<std::size_t> exact;
  std::optional<double> estimate;
  std::optional<double> std_error;
  MomentMethod method = MomentMethod::Dense;

  // Exact-solve diagnostics.
  std::size_t operator_dim = 0;
  std::size_t reduced_dim = 0;
  double spectral_gap = std::numeric_limits<double>::quiet_NaN();
  std::size_t matvecs = 0;

  // Monte-Carlo parameters.
  std::size_t samples = 0;
  std::size_t word_length = 0;
  std::uint64_t seed = 0;
  std::size_t streams = 0;
  /// Columns used per trace; equals register_dim when traces are exact.
  std::size_t trace_columns = 0;
};

struct MomentOptions {
  SubspaceMethod method = SubspaceMethod::Auto;
  FixedSubspaceOptions subspace;
  std::size_t max_dim = kDefaultMaxDim;
};

namespace detail {

inline void check_moment_order(std::size_t k) {
  if (k != 2 && k != 4) {
    throw Unsupported("moment half-order k must be 2 or 4, got " + std::to_string(k));
  }
}

}  // namespace detail

/// (g (x) conj g)^{(x)k} for a member g on N qudits, as an operator on 2kN
/// qudits. Copy c occupies qudits [cN, (c+1)N); odd copies are conjugated.
/// Gate factors are phase-canonicalized first, which leaves the operator
/// unchanged and lets phased permutations (iX, say) fold into orbits.
inline TensorWordOperator moment_operator(
    const TensorWordOperator& g, std::size_t k, std::size_t max_dim = kDefaultMaxDim) {
  const std::size_t N = g.qudits();
  const std::size_t copies = 2 * k;
  std::vector<Factor> factors;
  for (const auto& f : g.factors()) {
    if (const auto* gf = std::get_if<GateFactor>(&f)) {
      const Matrix canon = canonical_phase(gf->matrix);
      for (std::size_t c = 0; c < copies; ++c) {
        std::vector<std::size_t> t;
        t.reserve(gf->targets.size());
        for (auto q : gf->targets) t.push_back(q + c * N);
        factors.push_back(GateFactor{canon, std::move(t), gf->conjugated != (c % 2 == 1)});
      }
    } else {
      const auto& p = std::get<PermutationFactor>(f).perm;
      std::vector<std::size_t> big(copies * N);
      for (std::size_t c = 0; c < copies; ++c) {
        for (std::size_t q = 0; q < N; ++q) big[c * N + q] = p[q] + c * N;
      }
      factors.push_back(PermutationFactor{std::move(big)});
    }
  }
  return TensorWordOperator(g.d(), copies * N, std::move(factors), max_dim);
}

/// Exact moment of the group generated by arbitrary operators on one register.
inline MomentReport exact_moment(
    std::span<const TensorWordOperator> members, std::size_t k,
    const MomentOptions& opt = {}) {
  detail::check_moment_order(k);
  if (members.empty()) throw ValidationError("moment of an empty generator list");
  const std::size_t d = members.front().d();
  const std::size_t N = members.front().qudits();
  const std::size_t dim = checked_pow(d, 2 * k * N, opt.max_dim);
  std::vector<TensorWordOperator> ops;
  ops.reserve(members.size());
  for (const auto& g : members) ops.push_back(moment_operator(g, k, opt.max_dim));
  const auto r = fixed_subspace(ops, dim, opt.method, opt.subspace);
  MomentReport rep;
  rep.N = N;
  rep.k = k;
  rep.register_dim = checked_pow(d, N);
  rep.exact = r.dimension;
  rep.method = r.method == SubspaceMethod::Dense ? MomentMethod::Dense : MomentMethod::MatrixFree;
  rep.operator_dim = dim;
  rep.reduced_dim = r.reduced_dimension;
  rep.spectral_gap = r.spectral_gap;
  rep.matvecs = r.matvecs;
  return rep;
}

inline MomentReport exact_moment(
    const GeneratorFamily& fam, std::size_t k, const MomentOptions& opt = {}) {
  return exact_moment(std::span<const TensorWordOperator>(fam.members), k, opt);
}

// ---------------------------------------------------------------------------
// Monte-Carlo frame potential

struct MonteCarloOptions {
  std::size_t word_length = 200;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  /// Independent RNG streams; values are merged in stream order, so the
  /// result does not depend on how many threads run them.
  std::size_t streams = 4;
  std::size_t threads = 0;  // 0: hardware concurrency
  /// Registers up to this dimension multiply dense matrices.
  std::size_t dense_dim = 64;
  /// Above this dimension traces are estimated from sampled columns.
  std::size_t trace_column_limit = 4096;
  std::size_t trace_columns = 64;
};

namespace detail {

inline std::uint64_t stream_seed(std::uint64_t seed, std::size_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x6d6f6dU};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Delete-one-block jackknife standard error of the sample mean.
inline double jackknife_error(const std::vector<double>& x, std::size_t max_blocks = 100) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t blocks = std::min(n, max_blocks);
  std::vector<double> sums(blocks, 0.0);
  std::vector<std::size_t> counts(blocks, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * blocks / n;
    sums[b] += x[i];
    ++counts[b];
  }
  double total = 0.0;
  for (auto s : sums) total += s;
  std::vector<double> theta(blocks);
  double mean_theta = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    theta[b] = (total - sums[b]) / static_cast<double>(n - counts[b]);
    mean_theta += theta[b];
  }
  mean_theta /= static_cast<double>(blocks);
  double var = 0.0;
  for (auto t : theta) var += (t - mean_theta) * (t - mean_theta);
  return std::sqrt(var * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
}

/// Members plus inverses, without repeating self-inverse members.
inline std::vector<TensorWordOperator> symmetric_generators(
    std::span<const TensorWordOperator> members) {
  std::vector<TensorWordOperator> out;
  if (members.empty()) return out;
  const std::size_t dim = members.front().dim();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  const Vector probe = random_vector(dim, rng);
  std::vector<Vector> images;
  auto add = [&](const TensorWordOperator& op) {
    const Vector img = op.apply(probe);
    for (const auto& seen : images) {
      if ((seen - img).norm() <= 1e-11 * probe.norm()) return;
    }
    images.push_back(img);
    out.push_back(op);
  };
  for (const auto& g : members) {
    add(g);
    add(g.inverse());
  }
  return out;
}

}  // namespace detail

/// Average of |tr w|^2k over S independent random words w of length L, with a
/// jackknife standard error. Each letter is uniform over the members, their
/// inverses and the identity. The identity letter makes the walk lazy, so a
/// bipartite Cayley graph (X, Z on one qubit, say) still mixes.
inline MomentReport frame_potential_mc(
    std::span<const TensorWordOperator> members, std::size_t k,
    const MonteCarloOptions& opt = {}) {
  detail::check_moment_order(k);
  if (members.empty()) throw ValidationError("moment of an empty generator list");
  if (opt.word_length < 1 || opt.samples < 1) {
    throw ValidationError("Monte-Carlo word length and sample count must be at least 1");
  }
  const std::size_t m = members.front().dim();
  const auto gens = detail::symmetric_generators(members);
  const std::size_t streams = std::max<std::size_t>(1, std::min(opt.streams, opt.samples));

  std::vector<Matrix> dense;
  std::vector<CompiledOperator> compiled;
  if (m <= opt.dense_dim) {
    for (const auto& g : gens) dense.push_back(g.dense(opt.dense_dim));
  } else {
    for (const auto& g : gens) compiled.emplace_back(g);
  }
  const bool sample_columns = m > opt.trace_column_limit;
  const std::size_t columns = sample_columns ? std::min(opt.trace_columns, m) : m;

  auto run_stream = [&](std::size_t s, std::vector<double>& values) {
    std::mt19937_64 rng(detail::stream_seed(opt.seed, s));
    // Index gens.size() is the identity letter.
    std::uniform_int_distribution<std::size_t> pick(0, gens.size());
    const std::size_t idle = gens.size();
    std::uniform_int_distribution<std::size_t> pick_col(0, m - 1);
    std::vector<std::size_t> word(opt.word_length);
    std::vector<Complex> col(m), tmp(m);
    Matrix w(m, m), next(m, m);
    for (auto& v : values) {
      for (auto& g : word) g = pick(rng);
      Complex tr{0.0, 0.0};
      if (!dense.empty()) {
        w.setIdentity();
        for (auto g : word) {
          if (g == idle) continue;
          next.noalias() = dense[g] * w;
          w.swap(next);
        }
        tr = w.trace();
      } else {
        for (std::size_t c = 0; c < columns; ++c) {
          const std::size_t j = sample_columns ? pick_col(rng) : c;
          std::fill(col.begin(), col.end(), Complex{0.0, 0.0});
          col[j] = 1.0;
          for (auto g : word) {
            if (g == idle) continue;
            compiled[g].apply(col, tmp);
            col.swap(tmp);
          }
          tr += col[j];
        }
        if (sample_columns) tr *= static_cast<double>(m) / static_cast<double>(columns);
      }
      v = std::pow(std::norm(tr), static_cast<double>(k));
    }
  };

  std::vector<std::vector<double>> per_stream(streams);
  for (std::size_t s = 0; s < streams; ++s) {
    per_stream[s].resize(opt.samples / streams + (s < opt.samples % streams ? 1 : 0));
  }
  std::size_t threads = opt.threads ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, streams);
  if (threads <= 1) {
    for (std::size_t s = 0; s < streams; ++s) run_stream(s, per_stream[s]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t s = t; s < streams; s += threads) run_stream(s, per_stream[s]);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> values;
  values.reserve(opt.samples);
  for (const auto& ps : per_stream) values.insert(values.end(), ps.begin(), ps.end());
  double sum = 0.0;
  for (auto v : values) sum += v;

  MomentReport rep;
  rep.N = members.front().qudits();
  rep.k = k;
  rep.register_dim = m;
  rep.method = MomentMethod::MonteCarlo;
  rep.estimate = sum / static_cast<double>(values.size());
  rep.std_error = detail::jackknife_error(values);
  rep.samples = opt.samples;
  rep.word_length = opt.word_length;
  rep.seed = opt.seed;
  rep.streams = streams;
  rep.trace_columns = columns;
  return rep;
}

inline MomentReport frame_potential_mc(
    const GeneratorFamily& fam, std::size_t k, const MonteCarloOptions& opt = {}) {
  return frame_potential_mc(std::span<const TensorWordOperator>(fam.members), k, opt);
}

// ---------------------------------------------------------------------------
// Haar reference values

/// Haar value of M_2k on SU(m): 2 for k = 2 (m >= 2) and 24 for k = 4
/// (m >= 5). Other regimes are refused rather than guessed.
inline double haar_reference(std::size_t m, std::size_t k) {
  if (k == 2) {
    if (m < 2) throw Unsupported("Haar M_4 reference needs dimension m >= 2");
    return 2.0;
  }
  if (k == 4) {
    if (m < 5) throw Unsupported("Haar M_8 reference is only provided for dimension m >= 5");
    return 24.0;
  }
  throw Unsupported("Haar reference only available for k = 2 and k = 4");
}

/// Haar-random unitary (QR of a complex Ginibre matrix with the phases of
/// R's diagonal divided out).
inline Matrix haar_unitary(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) z(i, j) = Complex{g(rng), g(rng)};
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < m; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

}  // namespace evuniv
