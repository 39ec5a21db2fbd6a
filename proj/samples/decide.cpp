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

// Library walk-through: build a few gate sets in code, compute M4 exactly and
// by sampling, and ask for a verdict.
//
//   sample_decide            built-in examples
//   sample_decide FILE.json  a gate-set file

#include <iostream>

#include "evuniv/gates.hpp"
#include "evuniv/jeandel.hpp"
#include "evuniv/universality.hpp"

using namespace evuniv;

namespace {

void report(const std::string& name, const GateSet& gs, std::size_t n_max) {
  std::cout << name << "  (d=" << gs.d() << ", n=" << gs.n() << ", " << gs.size()
            << " gates after inverse closure, bound " << bound_new(gs.d(), gs.n()).str() << ")\n";
  const auto exact = exact_moment(gamma_N(gs, gs.n()), 2);
  std::cout << "  M4 at N=" << gs.n() << ": " << *exact.exact << " [" << to_string(exact.method) << "]\n";
  if (gamma_N(gs, gs.n()).dim() <= 16) {
    MonteCarloOptions mc;
    mc.samples = 20000;
    // Sample over every placement: the swap form mixes slowly.
    const auto est = frame_potential_mc(gamma_N(gs, gs.n(), FamilyMode::FullOrbit), 2, mc);
    std::cout << "  sampled: " << *est.estimate << " +- " << *est.std_error << "\n";
  }
  const auto v = decide_eventual(gs, n_max);
  std::cout << "  verdict: " << to_string(v.kind);
  if (v.N) std::cout << " N=" << *v.N;
  std::cout << "\n  " << v.reason << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  try {
    if (argc > 1) {
      report(argv[1], load_gateset_file(argv[1]), 4);
      return 0;
    }
    report("{H, T}", GateSet::from_matrices(2, 1, {{"H", gates::H()}, {"T", gates::T()}}), 4);
    report("{H, S}", GateSet::from_matrices(2, 1, {{"H", gates::H()}, {"S", gates::S()}}), 4);
    report("{X, Z}", GateSet::from_matrices(2, 1, {{"X", gates::X()}, {"Z", gates::Z()}}), 2);
    report("B2(default base)", build_family(default_omega(), 2).as_gateset(), 4);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
