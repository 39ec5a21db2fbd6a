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

// Deciding universality of the group generated by a gate set on N qudits.
//
// The engine rests on three facts it does not re-derive:
//   * a compact subgroup of SU(m) whose fourth moment equals the Haar value 2
//     is either finite or all of SU(m);
//   * for d^N >= 5 with N >= 2, a finite such group is Clifford-like (d a
//     prime power), Lie-type (d^N one of a few exceptional sizes) or the
//     single 3-qubit exception;
//   * if the fourth moment reaches 2 at some N, it does so by
//     N <= d^4 (n-1) + 1.
// The numerical parts (exact moments, the closure probe, the Clifford test)
// establish the hypotheses.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evuniv/diophantine.hpp"
#include "evuniv/errors.hpp"
#include "evuniv/gateset.hpp"
#include "evuniv/moments.hpp"
#include "evuniv/tensor.hpp"

namespace evuniv {

// ---------------------------------------------------------------------------
// Bounds

namespace detail {

inline BigInt moment_bound(std::size_t d, std::size_t n, unsigned power) {
  if (d < 2) throw ValidationError("local dimension d must be at least 2");
  if (n < 1) throw ValidationError("arity n must be at least 1");
  return boost::multiprecision::pow(BigInt(d), power) * BigInt(n - 1) + 1;
}

}  // namespace detail

/// d^4 (n-1) + 1: the largest register size that needs checking.
inline BigInt bound_new(std::size_t d, std::size_t n) { return detail::moment_bound(d, n, 4); }

/// d^8 (n-1) + 1: the older eighth-moment bound, kept for comparison.
inline BigInt bound_ivanyos(std::size_t d, std::size_t n) { return detail::moment_bound(d, n, 8); }

// ---------------------------------------------------------------------------
// Finiteness probe

enum class ProbeOutcome { Finite, InfiniteLikely, Inconclusive };

inline const char* to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Finite: return "Finite";
    case ProbeOutcome::InfiniteLikely: return "InfiniteLikely";
    case ProbeOutcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct FinitenessProbe {
  ProbeOutcome outcome = ProbeOutcome::Inconclusive;
  /// Group order counting matrices that differ by a phase as distinct.
  /// Empty unless the outcome is Finite and the scalar subgroup is finite.
  std::optional<std::size_t> order;
  /// Number of elements up to global phase found (the order of the
  /// projective group when the outcome is Finite).
  std::size_t projective_elements = 0;
  /// Order of the subgroup of scalar matrices, when Finite.
  std::optional<std::size_t> scalar_order;
  double dedup_epsilon = 1e-6;
  std::size_t cap = 0;
  /// Smallest projective distance between distinct accepted elements seen in
  /// a neighbour query (only pairs closer than 10 epsilon are examined).
  double min_distance = std::numeric_limits<double>::infinity();
  /// Projective element count after each breadth-first layer.
  std::vector<std::size_t> layer_sizes;
  std::string note;
};

struct ProbeOptions {
  double epsilon = 1e-6;
  std::size_t cap = 20000;
  /// The probe multiplies dense matrices; larger registers are refused.
  std::size_t max_dim = 64;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  std::uint64_t seed = 0x70726f6265ULL;
};

namespace detail {

/// Index of accepted matrices keyed by |<R, x>| for a fixed random unit R.
/// Since | |<R,x>| - |<R,y>| | <= min_phase |x - e^{i phi} y|_F, every element
/// within projective distance r of a query lies in the key window +-r.
class ProjectiveIndex {
 public:
  ProjectiveIndex(std::size_t m, std::uint64_t seed) : m_(m) {
    std::mt19937_64 rng(seed);
    ref_ = random_vector(m * m, rng).normalized();
  }

  double key(const Matrix& x) const {
    Complex s{0.0, 0.0};
    const Complex* p = x.data();
    for (std::size_t i = 0; i < m_ * m_; ++i) s += std::conj(ref_[static_cast<Eigen::Index>(i)]) * p[i];
    return std::abs(s);
  }

  /// min over phases of |x - e^{i phi} y|_F for unitaries x, y.
  double distance(const Matrix& x, const Matrix& y) const {
    const double t = std::abs((x.adjoint() * y).trace());
    return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(m_) - 2.0 * t));
  }

  struct Hit {
    std::size_t index;
    double distance;
  };

  /// Nearest stored element within `radius`, if any.
  std::optional<Hit> nearest(const Matrix& x, double k, double radius,
                             const std::vector<Matrix>& store) const {
    std::optional<Hit> best;
    for (auto it = by_key_.lower_bound(k - radius); it != by_key_.end() && it->first <= k + radius; ++it) {
      const double dist = distance(x, store[it->second]);
      if (dist <= radius && (!best || dist < best->distance)) best = Hit{it->second, dist};
    }
    return best;
  }

  void insert(double k, std::size_t index) { by_key_.emplace(k, index); }

 private:
  std::size_t m_;
  Vector ref_;
  std::multimap<double, std::size_t> by_key_;
};

inline std::size_t gcd_size(std::size_t a, std::size_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

}  // namespace detail

/// Breadth-first closure of the generated group up to global phase.
///
/// Elements are compared after optimal phase alignment. When the projective
/// closure terminates, the phases relating each product g*x to its stored
/// representative generate the scalar subgroup, which gives the order of the
/// group without phase alignment as well.
inline FinitenessProbe finiteness_probe(
    std::span<const TensorWordOperator> members, const ProbeOptions& opt = {}) {
  FinitenessProbe res;
  res.dedup_epsilon = opt.epsilon;
  res.cap = opt.cap;
  if (members.empty()) throw ValidationError("finiteness probe of an empty generator list");
  const std::size_t m = members.front().dim();
  if (m > opt.max_dim) {
    throw ResourceError(
        "finiteness probe needs dense matrices; dimension " + std::to_string(m) +
        " exceeds the probe limit " + std::to_string(opt.max_dim));
  }
  if ((opt.cap + 1) * m * m * sizeof(Complex) > opt.memory_budget_bytes) {
    throw ResourceError("finiteness probe cap does not fit the memory budget");
  }
  std::vector<Matrix> gens;
  for (const auto& g : members) gens.push_back(g.dense(opt.max_dim));

  detail::ProjectiveIndex index(m, opt.seed);
  std::vector<Matrix> elems;
  elems.push_back(Matrix::Identity(m, m));
  index.insert(index.key(elems[0]), 0);

  // Scalars appear as 2m-th roots of unity: determinants are +-1.
  const std::size_t roots = 2 * m;
  std::size_t scalar_gcd = roots;
  bool scalar_ok = true;
  const double window = 10.0 * opt.epsilon;

  std::size_t layer_begin = 0;
  std::size_t layer_end = 1;
  res.layer_sizes.push_back(1);
  bool capped = false;
  while (layer_begin < layer_end && !capped) {
    for (std::size_t i = layer_begin; i < layer_end && !capped; ++i) {
      for (const auto& g : gens) {
        Matrix y = g * elems[i];
        const double k = index.key(y);
        const auto hit = index.nearest(y, k, window, elems);
        if (hit && hit->distance <= opt.epsilon) {
          const Complex w = (elems[hit->index].adjoint() * y).trace() / static_cast<double>(m);
          const double turns = std::arg(w) / (2.0 * std::numbers::pi) * static_cast<double>(roots);
          const double nearest = std::round(turns);
          if (std::abs(turns - nearest) > 1e-6) {
            scalar_ok = false;
          } else {
            const auto r = static_cast<std::size_t>((static_cast<long long>(nearest) % static_cast<long long>(roots) + static_cast<long long>(roots)) % static_cast<long long>(roots));
            scalar_gcd = detail::gcd_size(scalar_gcd, r);
          }
          continue;
        }
        if (hit) res.min_distance = std::min(res.min_distance, hit->distance);
        elems.push_back(std::move(y));
        index.insert(k, elems.size() - 1);
        if (elems.size() > opt.cap) {
          capped = true;
          break;
        }
      }
    }
    layer_begin = layer_end;
    layer_end = elems.size();
    res.layer_sizes.push_back(elems.size());
  }
  res.projective_elements = elems.size();
  if (!capped) {
    res.outcome = ProbeOutcome::Finite;
    if (scalar_ok) {
      res.scalar_order = roots / scalar_gcd;
      res.order = res.projective_elements * *res.scalar_order;
    } else {
      res.note = "phases between equal projective elements are not roots of unity";
    }
  } else if (res.min_distance > window) {
    res.outcome = ProbeOutcome::InfiniteLikely;
    res.note = "more than " + std::to_string(opt.cap) + " distinct elements, all separated by more than 10 epsilon";
  } else {
    res.outcome = ProbeOutcome::Inconclusive;
    res.note = "element count exceeded the cap but elements crowd within 10 epsilon";
  }
  return res;
}

inline FinitenessProbe finiteness_probe(const GeneratorFamily& fam, const ProbeOptions& opt = {}) {
  return finiteness_probe(std::span<const TensorWordOperator>(fam.members), opt);
}

// ---------------------------------------------------------------------------
// Clifford membership

struct CliffordTest {
  std::vector<bool> per_gate;
  bool overall = true;
  /// Smallest overlap max_W |tr(W^dagger g P g^dagger)|/m over gates and
  /// Pauli generators P; 1 for Clifford gates.
  double worst_overlap = 1.0;
};

inline constexpr double kCliffordTolerance = 1e-8;

inline bool is_prime(std::size_t n) { return detail::is_prime_u64(n); }

/// p when n = p^e for a prime p, otherwise nullopt.
inline std::optional<std::size_t> prime_power_base(std::size_t n) {
  if (n < 2) return std::nullopt;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    return n == 1 ? std::optional<std::size_t>(p) : std::nullopt;
  }
  return n;
}

/// Tests whether each gate maps every generalized Pauli X_j, Z_j to a
/// generalized Pauli times a phase, in the computational basis.
inline CliffordTest clifford_member_test(const GateSet& gs, std::size_t max_dim = 1024) {
  const std::size_t d = gs.d();
  const std::size_t n = gs.n();
  if (!is_prime(d)) {
    throw Unsupported("Clifford test requires a prime local dimension, got d=" + std::to_string(d));
  }
  const std::size_t m = checked_pow(d, n, max_dim);
  const Matrix x = gates::weyl_shift(d);
  const Matrix z = gates::weyl_clock(d);
  std::vector<std::size_t> stride(n);
  for (std::size_t q = 0; q < n; ++q) stride[q] = checked_pow(d, n - 1 - q);
  std::vector<Matrix> paulis;
  for (std::size_t q = 0; q < n; ++q) {
    for (const Matrix* p : {&x, &z}) {
      paulis.push_back(embed(*p, d, {q}, n).dense(m));
    }
  }
  // W(a, b) e_v = w^{b.v} e_{v+a}, so tr(W^dagger C) = sum_v w^{-b.v} C(v+a, v):
  // for each shift a, a d-ary Fourier transform over v.
  auto shifted = [&](std::size_t v, std::size_t a) {
    std::size_t r = 0;
    for (std::size_t q = 0; q < n; ++q) {
      r += (((v / stride[q]) % d + (a / stride[q]) % d) % d) * stride[q];
    }
    return r;
  };
  std::vector<Complex> omega(d);
  for (std::size_t j = 0; j < d; ++j) {
    omega[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
  }
  std::vector<Complex> u(m), tmp(d);
  auto fourier = [&]() {
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t s = stride[q];
      for (std::size_t base = 0; base < m; ++base) {
        if ((base / s) % d != 0) continue;
        for (std::size_t b = 0; b < d; ++b) {
          Complex acc{0.0, 0.0};
          for (std::size_t v = 0; v < d; ++v) acc += omega[(b * v) % d] * u[base + v * s];
          tmp[b] = acc;
        }
        for (std::size_t b = 0; b < d; ++b) u[base + b * s] = tmp[b];
      }
    }
  };
  CliffordTest res;
  for (const auto& g : gs.gates()) {
    bool gate_ok = true;
    for (const auto& p : paulis) {
      const Matrix c = g.matrix() * p * g.matrix().adjoint();
      double best = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t v = 0; v < m; ++v) u[v] = c(shifted(v, a), v);
        fourier();
        for (const auto& t : u) best = std::max(best, std::abs(t) / static_cast<double>(m));
      }
      res.worst_overlap = std::min(res.worst_overlap, best);
      if (best < 1.0 - kCliffordTolerance) gate_ok = false;
    }
    res.per_gate.push_back(gate_ok);
    res.overall = res.overall && gate_ok;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictKind {
  UniversalAt,
  EventuallyUniversal,
  CliffordBlocked,
  FiniteNonDesign,
  NotEventuallyUniversal,
  NotDecided
};

inline const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::UniversalAt: return "UniversalAt";
    case VerdictKind::EventuallyUniversal: return "EventuallyUniversal";
    case VerdictKind::CliffordBlocked: return "CliffordBlocked";
    case VerdictKind::FiniteNonDesign: return "FiniteNonDesign";
    case VerdictKind::NotEventuallyUniversal: return "NotEventuallyUniversal";
    case VerdictKind::NotDecided: return "NotDecided";
  }
  return "?";
}

/// Everything established at one register size.
struct NEvidence {
  std::size_t N = 0;
  std::optional<MomentReport> moment;
  std::optional<FinitenessProbe> probe;
  std::string probe_skipped;
  /// Empty when the Clifford test does not apply (non-prime d).
  std::optional<bool> clifford;
  /// Whether the classification of finite groups with Haar fourth moment
  /// rules out finiteness at this N (given the Clifford test).
  bool classification_excludes_finite = false;
  std::string branch;
  /// decide_at's verdict for this N alone.
  VerdictKind local = VerdictKind::NotDecided;
};

struct Verdict {
  VerdictKind kind = VerdictKind::NotDecided;
  std::optional<std::size_t> N;
  std::string reason;
  std::vector<NEvidence> evidence;
  std::vector<std::string> caveats;

  /// True for verdicts that settle the question asked.
  bool decided() const { return kind != VerdictKind::NotDecided; }
};

struct DecideOptions {
  MomentOptions moment;
  ProbeOptions probe;
  /// Largest base gate dimension d^n the Clifford test will handle.
  std::size_t clifford_max_dim = 1024;
};

inline constexpr const char* kCliffordCaveat =
    "Clifford detection works in the computational basis only; a gate set conjugate to "
    "Clifford gates by a non-Clifford unitary is not recognised";

/// Whether Haar fourth moment plus the Clifford result exclude a finite
/// group on N qudits of dimension d.
inline bool classification_excludes_finite(
    std::size_t d, std::size_t N, std::optional<bool> clifford, std::string* why = nullptr) {
  auto say = [&](std::string s) {
    if (why) *why = std::move(s);
    return false;
  };
  if (N < 2) return say("classification needs N >= 2");
  const std::size_t m = checked_pow(d, N, std::numeric_limits<std::size_t>::max() / 2);
  if (m < 5) return say("classification needs d^N >= 5");
  if (is_lie_type_dimension(m)) return say("d^N = " + std::to_string(m) + " admits a Lie-type finite group");
  if (d == 2 && N == 3) return say("d=2, N=3 admits the exceptional finite group");
  if (prime_power_base(d)) {
    if (!is_prime(d)) return say("d is a non-prime prime power; Clifford test unavailable");
    if (!clifford.has_value() || *clifford) return say("Clifford test not negative");
  }
  if (why) *why = "finite groups excluded: not Lie-type, not exceptional, not Clifford";
  return true;
}

/// Verdict on universality at a single register size N.
inline Verdict decide_at(const GateSet& gs, std::size_t N, const DecideOptions& opt = {}) {
  if (N < gs.n()) {
    throw ValidationError(
        "register size N=" + std::to_string(N) + " is below the gate arity n=" + std::to_string(gs.n()));
  }
  const auto fam = gamma_N(gs, N, FamilyMode::SwapForm);
  NEvidence ev;
  ev.N = N;
  ev.moment = exact_moment(fam, 2, opt.moment);
  const std::size_t m4 = *ev.moment->exact;

  if (is_prime(gs.d())) {
    if (checked_pow(gs.d(), gs.n(), std::numeric_limits<std::size_t>::max() / 2) <= opt.clifford_max_dim) {
      ev.clifford = clifford_member_test(gs, opt.clifford_max_dim).overall;
    }
  }
  if (fam.dim() <= opt.probe.max_dim) {
    ev.probe = finiteness_probe(fam, opt.probe);
  } else {
    ev.probe_skipped = "register dimension " + std::to_string(fam.dim()) + " above probe limit " +
                       std::to_string(opt.probe.max_dim);
  }
  std::string why;
  ev.classification_excludes_finite = classification_excludes_finite(gs.d(), N, ev.clifford, &why);

  Verdict v;
  v.N = N;
  v.caveats.push_back(kCliffordCaveat);
  const bool probe_finite = ev.probe && ev.probe->outcome == ProbeOutcome::Finite;
  if (m4 != 2) {
    if (probe_finite) {
      v.kind = VerdictKind::FiniteNonDesign;
      ev.branch = "fourth moment above the Haar value; closure is finite";
      v.reason = "not universal at N=" + std::to_string(N) + ": M4 = " + std::to_string(m4) +
                 " and the generated group is finite";
    } else {
      v.kind = VerdictKind::NotDecided;
      ev.branch = "fourth moment above the Haar value";
      v.reason = "not universal at N=" + std::to_string(N) + ": M4 = " + std::to_string(m4) + " != 2";
    }
  } else if (ev.clifford.value_or(false)) {
    v.kind = VerdictKind::CliffordBlocked;
    ev.branch = "Clifford";
    v.reason = "all gates are Clifford; every Gamma^N lies in the finite Clifford group";
  } else if (probe_finite) {
    v.kind = VerdictKind::NotDecided;
    ev.branch = "finite group with Haar fourth moment";
    v.reason = "M4 = 2 but the closure is finite (" + std::to_string(ev.probe->projective_elements) +
               " elements up to phase)";
  } else if (ev.probe && ev.probe->outcome == ProbeOutcome::InfiniteLikely) {
    v.kind = VerdictKind::UniversalAt;
    ev.branch = "M4 = 2 and closure probe infinite";
    v.reason = "M4 = 2 and the closure probe found no finite group";
  } else if (ev.classification_excludes_finite) {
    v.kind = VerdictKind::UniversalAt;
    ev.branch = "M4 = 2 and classification excludes finiteness";
    v.reason = why;
  } else {
    v.kind = VerdictKind::NotDecided;
    ev.branch = "M4 = 2 without a finiteness certificate";
    v.reason = "M4 = 2 but finiteness is not excluded (" + why + ")";
  }
  v.evidence.push_back(std::move(ev));
  return v;
}

/// Searches N = n .. min(d^4 (n-1) + 1, N_max) for a universal register size.
inline Verdict decide_eventual(const GateSet& gs, std::size_t N_max, const DecideOptions& opt = {}) {
  if (N_max < gs.n()) {
    throw ValidationError("N_max=" + std::to_string(N_max) + " is below the gate arity n=" + std::to_string(gs.n()));
  }
  const BigInt bound = bound_new(gs.d(), gs.n());
  const std::size_t top = bound < N_max ? static_cast<std::size_t>(bound) : N_max;
  Verdict out;
  out.caveats.push_back(kCliffordCaveat);
  bool saw_haar_moment = false;
  for (std::size_t N = gs.n(); N <= top; ++N) {
    Verdict at;
    try {
      at = decide_at(gs, N, opt);
    } catch (const ResourceError& e) {
      out.kind = VerdictKind::NotDecided;
      out.reason = "resource-capped below the bound at N=" + std::to_string(N) + ": " + e.what();
      return out;
    }
    auto& ev = at.evidence.front();
    ev.local = at.kind;
    const bool haar = ev.moment && ev.moment->exact == 2;
    saw_haar_moment = saw_haar_moment || haar;
    out.evidence.push_back(ev);
    if (ev.clifford.value_or(false)) {
      out.kind = VerdictKind::CliffordBlocked;
      out.N.reset();
      out.reason = "all gates are Clifford; the generated groups are finite at every N";
      return out;
    }
    if (at.kind == VerdictKind::UniversalAt) {
      out.kind = VerdictKind::EventuallyUniversal;
      out.N = N;
      out.reason = "universal at N=" + std::to_string(N) + ": " + at.reason;
      return out;
    }
    const bool probe_finite = ev.probe && ev.probe->outcome == ProbeOutcome::Finite;
    if (haar && N >= 4 && ev.clifford.has_value() && !*ev.clifford && !probe_finite) {
      // At N >= 4 only the Clifford-like branch of the classification remains.
      out.kind = VerdictKind::EventuallyUniversal;
      out.N = N;
      out.reason = "M4 = 2 at N=" + std::to_string(N) + " >= 4 and the Clifford test is negative";
      return out;
    }
  }
  if (top < bound) {
    out.kind = VerdictKind::NotDecided;
    out.reason = "resource-capped below the bound: examined N <= " + std::to_string(top) +
                 ", bound is " + bound.str();
    return out;
  }
  if (!saw_haar_moment) {
    out.kind = VerdictKind::NotEventuallyUniversal;
    out.reason = "M4 != 2 at every N up to the bound " + bound.str();
    return out;
  }
  out.kind = VerdictKind::NotDecided;
  out.reason = "M4 = 2 was reached but universality was not certified up to the bound";
  return out;
}

}  // namespace evuniv
