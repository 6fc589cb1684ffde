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

#include "reducechop/ansatz.hpp"

#include <cmath>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"

namespace reducechop {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

void check_param_count(std::size_t got, std::size_t want, const char* family) {
  if (got != want) {
    fail("bad_params", std::string(family) + " expects " + std::to_string(want) +
                           " parameters, got " + std::to_string(got));
  }
}

}  // namespace

Circuit TfimAnsatz::circuit(std::span<const double> phi) const {
  if (n < 2) fail("bad_qubit_count", "TFIM ansatz needs at least 2 qubits");
  if (layers < 1) fail("bad_params", "TFIM ansatz needs at least 1 layer");
  check_param_count(phi.size(), param_count(), "TFIM ansatz");

  Circuit c(n);
  std::size_t next = 0;
  for (int layer = 0; layer < layers; ++layer) {
    std::vector<Gate> rx_layer;
    rx_layer.reserve(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) rx_layer.push_back(Gate::rx(q, phi[next++]));
    c.add_layer(std::move(rx_layer));

    // Ring edges (e, e+1 mod n) in parameter order, placed into disjoint
    // matchings: even-start edges, odd-start edges, then the wrap edge when
    // the cycle has odd length.
    std::vector<Gate> even_edges, odd_edges, wrap_edges;
    for (int e = 0; e < n; ++e) {
      Gate g = Gate::zz(e, (e + 1) % n, phi[next++]);
      if (e == n - 1 && (n % 2 == 1)) {
        wrap_edges.push_back(g);
      } else if (e % 2 == 0) {
        even_edges.push_back(g);
      } else {
        odd_edges.push_back(g);
      }
    }
    c.add_layer(std::move(even_edges));
    c.add_layer(std::move(odd_edges));
    if (!wrap_edges.empty()) c.add_layer(std::move(wrap_edges));
  }
  return c;
}

Circuit HeaAnsatz::circuit(std::span<const double> theta) const {
  if (n < 2) fail("bad_qubit_count", "HEA needs at least 2 qubits");
  if (layers < 1) fail("bad_params", "HEA needs at least 1 layer");
  check_param_count(theta.size(), param_count(), "HEA");

  Circuit c(n);
  std::size_t next = 0;
  auto add_u3_layer = [&] {
    std::vector<Gate> layer;
    layer.reserve(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
      double a = theta[next], b = theta[next + 1], g = theta[next + 2];
      next += 3;
      layer.push_back(Gate::u3(q, a, b, g));
    }
    c.add_layer(std::move(layer));
  };

  for (int layer = 0; layer < layers; ++layer) {
    add_u3_layer();
    for (int offset = 0; offset < 2; ++offset) {
      std::vector<Gate> cz_layer;
      for (int q = offset; q + 1 < n; q += 2) {
        cz_layer.push_back(Gate::cz(q, q + 1));
      }
      if (offset == 1 && n % 2 == 0) cz_layer.push_back(Gate::cz(n - 1, 0));
      if (!cz_layer.empty()) c.add_layer(std::move(cz_layer));
    }
  }
  add_u3_layer();
  return c;
}

Circuit build_tfim(int n, int l_u, std::span<const double> phi) {
  return TfimAnsatz{n, l_u}.circuit(phi);
}

Circuit build_hea(int n, int l_r, std::span<const double> theta) {
  return HeaAnsatz{n, l_r}.circuit(theta);
}

Statevector soft_activated_state(const Circuit& u1, double t) {
  if (t < 0.0 || t > 1.0) {
    fail("bad_argument", "activation parameter t must lie in [0, 1]");
  }
  Statevector evolved = run_circuit(u1);
  const double c = std::cos(kPi * t / 2.0);
  const double s = std::sin(kPi * t / 2.0);
  std::vector<std::complex<double>> amps = evolved.amplitudes();
  for (auto& a : amps) a *= s;
  amps[0] += c;
  double norm_sq = 0.0;
  for (const auto& a : amps) norm_sq += std::norm(a);
  if (norm_sq < kTol.degenerate_norm) {
    fail("degenerate_state",
         "interpolated state has vanishing norm at t=" + std::to_string(t));
  }
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (auto& a : amps) a *= scale;
  return Statevector(u1.qubits(), std::move(amps));
}

std::vector<double> parametric_activation(std::span<const double> phi_full,
                                          std::size_t active) {
  if (active > phi_full.size()) {
    fail("bad_argument", "active count exceeds parameter vector length");
  }
  std::vector<double> out(phi_full.size(), 0.0);
  for (std::size_t i = 0; i < active; ++i) out[i] = phi_full[i];
  return out;
}

std::vector<double> random_params(std::size_t count, Rng& rng) {
  std::vector<double> out(count);
  for (auto& v : out) v = kTwoPi * rng.uniform();
  return out;
}

}  // namespace reducechop
