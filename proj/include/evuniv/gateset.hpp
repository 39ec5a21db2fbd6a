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

// Gate sets, their interchange format, and the register families built from
// them.
//
// File format (UTF-8 JSON):
//   {"d": 2, "n": 1,
//    "gates": [{"label": "H",
//               "matrix": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
//                          [[0.7071067811865476, 0], [-0.7071067811865476, 0]]]}]}
// Matrices are row-major; each complex entry is a [re, im] pair.

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evuniv/errors.hpp"
#include "evuniv/tensor.hpp"

namespace evuniv {

/// Where a gate of a normalized GateSet came from.
struct GateOrigin {
  std::string label;
  /// Determinant of the gate as supplied (for appended adjoints: of the
  /// adjoint of the supplied gate).
  Complex input_determinant{1.0, 0.0};
  /// Phase the supplied gate was multiplied by to reach determinant 1.
  Complex applied_phase{1.0, 0.0};
  /// Set for adjoints appended by inverse closure: index of the source gate.
  std::optional<std::size_t> adjoint_of;
};

struct LabeledMatrix {
  std::string label;
  Matrix matrix;
};

/// Finite inverse-closed set of special-unitary gates on n qudits of local
/// dimension d.
class GateSet {
 public:
  static constexpr double kTolerance = 1e-10;
  static constexpr double kDeterminantTolerance = 1e-8;

  /// Validates, rescales each gate into SU(d^n), and appends missing
  /// adjoints (compared entrywise, without phase alignment).
  static GateSet from_matrices(
      std::size_t d, std::size_t n, const std::vector<LabeledMatrix>& input) {
    if (d < 2) throw ValidationError("local dimension d must be at least 2");
    if (n < 1) throw ValidationError("arity n must be at least 1");
    if (input.empty()) throw ValidationError("gate set has no gates");
    const std::size_t m = checked_pow(d, n);
    GateSet gs;
    gs.d_ = d;
    gs.n_ = n;
    for (std::size_t i = 0; i < input.size(); ++i) {
      const auto& [label, mat] = input[i];
      const std::string name = label.empty() ? "gate" + std::to_string(i) : label;
      if (static_cast<std::size_t>(mat.rows()) != m || static_cast<std::size_t>(mat.cols()) != m) {
        throw ValidationError(
            "gate '" + name + "' is " + std::to_string(mat.rows()) + "x" +
            std::to_string(mat.cols()) + " but d=" + std::to_string(d) + ", n=" +
            std::to_string(n) + " requires " + std::to_string(m) + "x" + std::to_string(m));
      }
      const double defect = unitarity_defect(mat);
      if (!(defect <= kTolerance)) {
        throw ValidationError(
            "gate '" + name + "' is not unitary: defect " + std::to_string(defect) +
            " > " + std::to_string(kTolerance));
      }
      const Complex det = mat.determinant();
      if (std::abs(std::abs(det) - 1.0) > kDeterminantTolerance) {
        throw ValidationError(
            "gate '" + name + "' has |det| = " + std::to_string(std::abs(det)));
      }
      const Complex phase = std::polar(1.0, -std::arg(det) / static_cast<double>(m));
      gs.gates_.push_back(Unitary::from_matrix(mat * phase, 1e-9));
      gs.origins_.push_back(GateOrigin{name, det, phase, std::nullopt});
    }
    const std::size_t supplied = gs.gates_.size();
    for (std::size_t i = 0; i < supplied; ++i) {
      const Matrix adj = gs.gates_[i].matrix().adjoint();
      bool present = false;
      for (const auto& g : gs.gates_) {
        if ((g.matrix() - adj).norm() <= kTolerance) {
          present = true;
          break;
        }
      }
      if (!present) {
        gs.gates_.push_back(gs.gates_[i].adjoint());
        gs.origins_.push_back(GateOrigin{
            gs.origins_[i].label + "^dag", std::conj(gs.origins_[i].input_determinant),
            std::conj(gs.origins_[i].applied_phase), i});
      }
    }
    return gs;
  }

  std::size_t d() const { return d_; }
  std::size_t n() const { return n_; }
  std::size_t dim() const { return gates_.empty() ? 0 : gates_.front().dim(); }
  std::size_t size() const { return gates_.size(); }
  const std::vector<Unitary>& gates() const { return gates_; }
  const std::vector<GateOrigin>& origins() const { return origins_; }
  const std::string& label(std::size_t i) const { return origins_[i].label; }

  /// Number of gates read from the input, before inverse closure.
  std::size_t supplied_count() const {
    std::size_t c = 0;
    for (const auto& o : origins_) c += o.adjoint_of ? 0 : 1;
    return c;
  }

 private:
  GateSet() = default;

  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::vector<Unitary> gates_;
  std::vector<GateOrigin> origins_;
};

// ---------------------------------------------------------------------------
// Interchange format

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(nlohmann::json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json gateset_to_json(
    std::size_t d, std::size_t n, const std::vector<LabeledMatrix>& gates) {
  nlohmann::json j;
  j["d"] = d;
  j["n"] = n;
  j["gates"] = nlohmann::json::array();
  for (const auto& g : gates) {
    j["gates"].push_back({{"label", g.label}, {"matrix", matrix_to_json(g.matrix)}});
  }
  return j;
}

inline std::string dump_gateset(
    std::size_t d, std::size_t n, const std::vector<LabeledMatrix>& gates) {
  return gateset_to_json(d, n, gates).dump(1) + "\n";
}

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& rows, const std::string& label) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError("gate '" + label + "': matrix must be a non-empty array of rows");
  }
  const auto nrows = rows.size();
  const auto ncols = rows.front().is_array() ? rows.front().size() : 0;
  Matrix m(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < nrows; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != ncols) {
      throw ParseError("gate '" + label + "': row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      const auto& z = row[j];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw ParseError(
            "gate '" + label + "': entry (" + std::to_string(i) + "," + std::to_string(j) +
            ") must be a [re, im] pair of numbers");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Complex{z[0].get<double>(), z[1].get<double>()};
    }
  }
  return m;
}

}  // namespace detail

/// Parses the interchange format into raw (un-normalized) labeled matrices.
inline std::pair<std::pair<std::size_t, std::size_t>, std::vector<LabeledMatrix>>
parse_gateset_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("gate-set file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("gate-set file must contain a JSON object");
  for (const char* key : {"d", "n", "gates"}) {
    if (!j.contains(key)) throw ParseError(std::string("gate-set file is missing \"") + key + "\"");
  }
  if (!j["d"].is_number_integer() || !j["n"].is_number_integer()) {
    throw ParseError("\"d\" and \"n\" must be integers");
  }
  if (j["d"].get<long long>() < 0 || j["n"].get<long long>() < 0) {
    throw ValidationError("\"d\" and \"n\" must be non-negative");
  }
  if (!j["gates"].is_array()) throw ParseError("\"gates\" must be an array");
  const auto d = j["d"].get<std::size_t>();
  const auto n = j["n"].get<std::size_t>();
  std::vector<LabeledMatrix> gates;
  for (std::size_t i = 0; i < j["gates"].size(); ++i) {
    const auto& g = j["gates"][i];
    if (!g.is_object() || !g.contains("matrix")) {
      throw ParseError("gate " + std::to_string(i) + " must be an object with a \"matrix\"");
    }
    std::string label = "gate" + std::to_string(i);
    if (g.contains("label")) {
      if (!g["label"].is_string()) throw ParseError("gate labels must be strings");
      label = g["label"].get<std::string>();
    }
    gates.push_back({label, detail::matrix_from_json(g["matrix"], label)});
  }
  return {{d, n}, std::move(gates)};
}

inline GateSet load_gateset(std::string_view text) {
  auto [dn, gates] = parse_gateset_json(text);
  return GateSet::from_matrices(dn.first, dn.second, gates);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline GateSet load_gateset_file(const std::string& path) {
  return load_gateset(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Embedding and register families

/// `g` acting on the listed qudits (first target = most significant digit of
/// g's index) of an N-qudit register, identity elsewhere.
inline TensorWordOperator embed(
    const Matrix& g, std::size_t d, const std::vector<std::size_t>& targets, std::size_t N) {
  if (targets.size() > N) throw ValidationError("more targets than register qudits");
  return TensorWordOperator(d, N, {GateFactor{g, targets, false}});
}

inline TensorWordOperator embed(
    const Unitary& g, std::size_t d, const std::vector<std::size_t>& targets, std::size_t N) {
  return embed(g.matrix(), d, targets, N);
}

enum class FamilyMode { FullOrbit, SwapForm };

inline const char* to_string(FamilyMode m) {
  return m == FamilyMode::FullOrbit ? "FullOrbit" : "SwapForm";
}

/// Generators of the group acting on N qudits that a gate set produces once
/// its gates may be placed on any n of the N qudits.
struct GeneratorFamily {
  std::size_t N = 0;
  std::size_t d = 0;
  std::size_t n = 0;
  FamilyMode mode = FamilyMode::SwapForm;
  std::vector<TensorWordOperator> members;
  std::vector<std::string> labels;

  std::size_t dim() const { return members.empty() ? checked_pow(d, N) : members.front().dim(); }
};

/// SwapForm: gates on qudits 0..n-1 plus the adjacent transpositions (i, i+1).
/// FullOrbit: one embedded copy per gate and ordered target tuple.
inline GeneratorFamily gamma_N(
    const GateSet& gs, std::size_t N, FamilyMode mode = FamilyMode::SwapForm,
    std::size_t max_members = 100000) {
  if (N < gs.n()) {
    throw ValidationError(
        "register size N=" + std::to_string(N) + " is smaller than the gate arity n=" +
        std::to_string(gs.n()));
  }
  checked_pow(gs.d(), N);
  GeneratorFamily fam;
  fam.N = N;
  fam.d = gs.d();
  fam.n = gs.n();
  fam.mode = mode;
  if (mode == FamilyMode::SwapForm) {
    std::vector<std::size_t> first(gs.n());
    std::iota(first.begin(), first.end(), std::size_t{0});
    for (std::size_t i = 0; i < gs.size(); ++i) {
      fam.members.push_back(embed(gs.gates()[i], gs.d(), first, N));
      fam.labels.push_back(gs.label(i));
    }
    for (std::size_t i = 0; i + 1 < N; ++i) {
      auto p = QuditPermutation::transposition(gs.d(), N, i, i + 1).map();
      fam.members.emplace_back(gs.d(), N, std::vector<Factor>{PermutationFactor{p}});
      fam.labels.push_back("SWAP(" + std::to_string(i) + "," + std::to_string(i + 1) + ")");
    }
    return fam;
  }
  // All ordered n-tuples of distinct qudits.
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (std::size_t depth = 0; depth < gs.n(); ++depth) {
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
    if (tuples.size() * gs.size() > max_members) {
      throw ResourceError("FullOrbit family would exceed " + std::to_string(max_members) + " members");
    }
  }
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (const auto& t : tuples) {
      fam.members.push_back(embed(gs.gates()[i], gs.d(), t, N));
      std::string lab = gs.label(i) + "@";
      for (std::size_t k = 0; k < t.size(); ++k) lab += (k ? "," : "") + std::to_string(t[k]);
      fam.labels.push_back(std::move(lab));
    }
  }
  return fam;
}

}  // namespace evuniv
