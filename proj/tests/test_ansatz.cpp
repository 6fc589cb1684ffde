// Copyright 2026 The reducechop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reducechop/ansatz.hpp"
#include "reducechop/error.hpp"
#include "test_util.hpp"

using namespace reducechop;
using oracle::cplx;

TEST_CASE("build_tfim: zero angles act as the identity") {
  std::vector<double> phi(TfimAnsatz{3, 1}.param_count(), 0.0);
  Circuit c = build_tfim(3, 1, phi);
  Rng rng(2);
  Statevector in = testutil::random_state(3, rng);
  Statevector out = run_circuit(c, in);
  CHECK(testutil::max_amp_diff(out, in.amplitudes()) <= 1e-12);
}

TEST_CASE("build_tfim: reported depth and parameter counts") {
  // Depth accounting must match the closed formulas over the whole grid.
  for (int n = 2; n <= 10; ++n) {
    for (int l = 1; l <= 10; ++l) {
      TfimAnsatz tfim{n, l};
      CHECK(tfim.reported_depth() == 4 * l);
      CHECK(tfim.param_count() == static_cast<std::size_t>(2 * n * l));
      HeaAnsatz hea{n, l};
      CHECK(hea.reported_depth() == 2 * l);
      CHECK(hea.param_count() == static_cast<std::size_t>(3 * n * (l + 1)));
    }
  }
  CHECK(TfimAnsatz{8, 10}.reported_depth() == 40);
  CHECK(HeaAnsatz{8, 2}.reported_depth() == 4);
}

TEST_CASE("build_tfim: unitarity via dagger composition") {
  Rng rng(7);
  for (int n : {2, 3, 5}) {
    std::vector<double> phi = random_params(TfimAnsatz{n, 2}.param_count(), rng);
    Circuit c = build_tfim(n, 2, phi);
    Statevector in = testutil::random_state(n, rng);
    Statevector out = run_circuit(c.then(c.dagger()), in);
    CHECK(testutil::max_amp_diff(out, in.amplitudes()) <= 1e-10);
  }
}

TEST_CASE("build_tfim: ring edges all present with layer-major parameters") {
  Rng rng(13);
  std::vector<double> phi = random_params(TfimAnsatz{4, 2}.param_count(), rng);
  Circuit c = build_tfim(4, 2, phi);

  // Per layer: 1 RX layer + 2 ZZ matchings; dense-oracle equivalence pins
  // the parameter-to-gate assignment.
  CHECK(c.layer_count() == 6);
  std::size_t zz_count = 0;
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer) {
      if (g.kind == GateKind::kZz) ++zz_count;
    }
  }
  CHECK(zz_count == 8);  // n edges per layer, 2 layers

  oracle::Matrix u = oracle::circuit_unitary(c);
  std::vector<cplx> in(16, 0.0);
  in[0] = 1.0;
  Statevector fast = run_circuit(c);
  CHECK(testutil::max_amp_diff(fast, oracle::apply_matrix(u, in)) <= 1e-10);
}

TEST_CASE("build_tfim: parameter length validation") {
  std::vector<double> phi(5, 0.0);
  CHECK_THROWS_AS(build_tfim(3, 1, phi), Error);
}

TEST_CASE("build_hea: zero angles fix |0...0>") {
  for (int n : {2, 3, 4, 6}) {
    std::vector<double> theta(HeaAnsatz{n, 2}.param_count(), 0.0);
    Circuit c = build_hea(n, 2, theta);
    Statevector out = run_circuit(c);
    CHECK(testutil::close(out[0], cplx(1, 0), 1e-12));
  }
}

TEST_CASE("build_hea: frozen cyclic CZ layout for n=4, L_R=1") {
  // Reference layout, enumerated by hand from the alternating-matching rule:
  // U3 layer; CZ (0,1),(2,3); CZ (1,2),(3,0); U3 layer.
  std::vector<double> theta(HeaAnsatz{4, 1}.param_count(), 0.0);
  Circuit c = build_hea(4, 1, theta);
  REQUIRE(c.layer_count() == 4);

  const auto& first_cz = c.layers()[1];
  REQUIRE(first_cz.size() == 2);
  CHECK(first_cz[0] == Gate::cz(0, 1));
  CHECK(first_cz[1] == Gate::cz(2, 3));

  const auto& second_cz = c.layers()[2];
  REQUIRE(second_cz.size() == 2);
  CHECK(second_cz[0] == Gate::cz(1, 2));
  CHECK(second_cz[1] == Gate::cz(3, 0));

  CHECK(c.entangling_depth() == 2);
}

TEST_CASE("build_hea: unitarity via dagger composition") {
  Rng rng(19);
  for (int n : {2, 4, 5}) {
    std::vector<double> theta = random_params(HeaAnsatz{n, 1}.param_count(), rng);
    Circuit c = build_hea(n, 1, theta);
    Statevector in = testutil::random_state(n, rng);
    Statevector out = run_circuit(c.then(c.dagger()), in);
    CHECK(testutil::max_amp_diff(out, in.amplitudes()) <= 1e-10);
  }
}

TEST_CASE("soft_activated_state: endpoints and the orthogonal midpoint") {
  Rng rng(23);
  std::vector<double> phi = random_params(TfimAnsatz{3, 2}.param_count(), rng);
  Circuit u1 = build_tfim(3, 2, phi);

  Statevector at0 = soft_activated_state(u1, 0.0);
  CHECK(testutil::close(at0[0], cplx(1, 0), 1e-12));

  Statevector at1 = soft_activated_state(u1, 1.0);
  Statevector direct = run_circuit(u1);
  CHECK(fidelity(at1, direct) == doctest::Approx(1.0).epsilon(1e-12));

  // U1 = X on one qubit: the two branches are orthogonal, so t = 1/2 gives
  // equal weights.
  Circuit flip(1);
  flip.add_gate(Gate::x(0));
  Statevector mid = soft_activated_state(flip, 0.5);
  CHECK(testutil::close(mid[0], cplx(std::sqrt(0.5), 0), 1e-12));
  CHECK(testutil::close(mid[1], cplx(std::sqrt(0.5), 0), 1e-12));

  CHECK_THROWS_AS(soft_activated_state(flip, 1.5), Error);
  CHECK_THROWS_AS(soft_activated_state(flip, -0.1), Error);
}

TEST_CASE("soft_activated_state: degenerate norm raises") {
  // U1|0> = -|0> makes the t=1/2 combination vanish.
  Circuit minus(1);
  minus.add_gate(Gate::x(0));
  minus.add_gate(Gate::phase(0, 3.1415926535897932));
  minus.add_gate(Gate::x(0));
  CHECK_THROWS_AS(soft_activated_state(minus, 0.5), Error);
}

TEST_CASE("soft_activated_state: continuity in t") {
  Rng rng(29);
  std::vector<double> phi = random_params(TfimAnsatz{4, 2}.param_count(), rng);
  Circuit u1 = build_tfim(4, 2, phi);
  for (int i = 0; i < 100; ++i) {
    double t = rng.uniform() * (1.0 - 1e-4);
    Statevector a = soft_activated_state(u1, t);
    Statevector b = soft_activated_state(u1, t + 1e-4);
    double dist_sq = 0.0;
    for (std::size_t k = 0; k < a.dimension(); ++k) dist_sq += std::norm(a[k] - b[k]);
    CHECK(std::sqrt(dist_sq) <= 1e-2);
  }
}

TEST_CASE("parametric_activation: prefix semantics") {
  std::vector<double> phi{0.4, 1.2, 2.2, 3.1};
  CHECK(parametric_activation(phi, 0) == std::vector<double>{0, 0, 0, 0});
  CHECK(parametric_activation(phi, 4) == phi);
  CHECK(parametric_activation(phi, 2) == std::vector<double>{0.4, 1.2, 0, 0});
  CHECK_THROWS_AS(parametric_activation(phi, 5), Error);
}

TEST_CASE("parametric_activation: k=1 on TFIM(2,1) leaves one live RX") {
  Rng rng(31);
  std::vector<double> phi = random_params(TfimAnsatz{2, 1}.param_count(), rng);
  std::vector<double> partial = parametric_activation(phi, 1);
  Statevector out = run_circuit(build_tfim(2, 1, partial));

  // Oracle: RX(phi0) acting on qubit 0 alone.
  Circuit rx_only(2);
  rx_only.add_gate(Gate::rx(0, phi[0]));
  oracle::Matrix u = oracle::circuit_unitary(rx_only);
  std::vector<cplx> in(4, 0.0);
  in[0] = 1.0;
  CHECK(testutil::max_amp_diff(out, oracle::apply_matrix(u, in)) <= 1e-12);
}

TEST_CASE("random_params stay in [0, 2*pi) and are seed-stable") {
  Rng a(5), b(5);
  auto pa = random_params(64, a);
  auto pb = random_params(64, b);
  CHECK(pa == pb);
  for (double v : pa) {
    CHECK(v >= 0.0);
    CHECK(v < 6.2831853072);
  }
}
