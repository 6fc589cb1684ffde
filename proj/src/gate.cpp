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

#include "reducechop/gate.hpp"

#include <cmath>

#include "reducechop/error.hpp"

namespace reducechop {

namespace {

using cplx = std::complex<double>;

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

void require_distinct(int a, int b, const char* kind) {
  if (a == b) {
    fail("bad_gate", std::string(kind) + " requires two distinct qubits");
  }
}

}  // namespace

Gate Gate::h(int q) { return Gate{GateKind::kH, q, -1, {}}; }
Gate Gate::x(int q) { return Gate{GateKind::kX, q, -1, {}}; }

Gate Gate::cnot(int control, int target) {
  require_distinct(control, target, "CNOT");
  return Gate{GateKind::kCnot, control, target, {}};
}

Gate Gate::cz(int a, int b) {
  require_distinct(a, b, "CZ");
  return Gate{GateKind::kCz, a, b, {}};
}

Gate Gate::rx(int q, double theta) { return Gate{GateKind::kRx, q, -1, {theta, 0, 0}}; }
Gate Gate::rz(int q, double theta) { return Gate{GateKind::kRz, q, -1, {theta, 0, 0}}; }

Gate Gate::zz(int a, int b, double theta) {
  require_distinct(a, b, "ZZ");
  return Gate{GateKind::kZz, a, b, {theta, 0, 0}};
}

Gate Gate::u3(int q, double alpha, double beta, double gamma) {
  return Gate{GateKind::kU3, q, -1, {alpha, beta, gamma}};
}

Gate Gate::phase(int q, double phi) { return Gate{GateKind::kPhase, q, -1, {phi, 0, 0}}; }

int Gate::arity() const {
  switch (kind) {
    case GateKind::kCnot:
    case GateKind::kCz:
    case GateKind::kZz:
      return 2;
    default:
      return 1;
  }
}

int Gate::param_count() const {
  switch (kind) {
    case GateKind::kH:
    case GateKind::kX:
    case GateKind::kCnot:
    case GateKind::kCz:
      return 0;
    case GateKind::kU3:
      return 3;
    default:
      return 1;
  }
}

bool Gate::is_diagonal() const {
  switch (kind) {
    case GateKind::kCz:
    case GateKind::kRz:
    case GateKind::kZz:
    case GateKind::kPhase:
      return true;
    default:
      return false;
  }
}

Gate Gate::dagger() const {
  Gate inv = *this;
  switch (kind) {
    case GateKind::kH:
    case GateKind::kX:
    case GateKind::kCnot:
    case GateKind::kCz:
      return inv;
    case GateKind::kRx:
    case GateKind::kRz:
    case GateKind::kZz:
    case GateKind::kPhase:
      inv.params[0] = -params[0];
      return inv;
    case GateKind::kU3:
      // U3(a, b, g)^-1 = U3(-a, -g, -b)
      inv.params = {-params[0], -params[2], -params[1]};
      return inv;
  }
  fail("bad_gate", "unknown gate kind");
}

std::array<cplx, 4> Gate::matrix1() const {
  const cplx i(0.0, 1.0);
  switch (kind) {
    case GateKind::kH:
      return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateKind::kX:
      return {0, 1, 1, 0};
    case GateKind::kRx: {
      double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      return {c, -i * s, -i * s, c};
    }
    case GateKind::kRz: {
      cplx e = std::exp(-i * (params[0] / 2));
      return {e, 0, 0, std::conj(e)};
    }
    case GateKind::kU3: {
      double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      cplx eb = std::exp(i * params[1]), eg = std::exp(i * params[2]);
      return {c, -eg * s, eb * s, eb * eg * c};
    }
    case GateKind::kPhase:
      return {1, 0, 0, std::exp(i * params[0])};
    default:
      fail("bad_gate", "matrix1 called on a two-qubit gate");
  }
}

std::array<cplx, 16> Gate::matrix2() const {
  std::array<cplx, 16> m{};
  const cplx i(0.0, 1.0);
  switch (kind) {
    case GateKind::kCnot:
      m[0 * 4 + 0] = 1;
      m[1 * 4 + 1] = 1;
      m[2 * 4 + 3] = 1;
      m[3 * 4 + 2] = 1;
      return m;
    case GateKind::kCz:
      m[0 * 4 + 0] = 1;
      m[1 * 4 + 1] = 1;
      m[2 * 4 + 2] = 1;
      m[3 * 4 + 3] = -1;
      return m;
    case GateKind::kZz: {
      cplx e = std::exp(-i * (params[0] / 2));
      m[0 * 4 + 0] = e;
      m[1 * 4 + 1] = std::conj(e);
      m[2 * 4 + 2] = std::conj(e);
      m[3 * 4 + 3] = e;
      return m;
    }
    default:
      fail("bad_gate", "matrix2 called on a single-qubit gate");
  }
}

std::string Gate::kind_name() const {
  switch (kind) {
    case GateKind::kH: return "H";
    case GateKind::kX: return "X";
    case GateKind::kCnot: return "CNOT";
    case GateKind::kCz: return "CZ";
    case GateKind::kRx: return "RX";
    case GateKind::kRz: return "RZ";
    case GateKind::kZz: return "ZZ";
    case GateKind::kU3: return "U3";
    case GateKind::kPhase: return "PHASE";
  }
  fail("bad_gate", "unknown gate kind");
}

GateKind Gate::kind_from_name(const std::string& name) {
  if (name == "H") return GateKind::kH;
  if (name == "X") return GateKind::kX;
  if (name == "CNOT") return GateKind::kCnot;
  if (name == "CZ") return GateKind::kCz;
  if (name == "RX") return GateKind::kRx;
  if (name == "RZ") return GateKind::kRz;
  if (name == "ZZ") return GateKind::kZz;
  if (name == "U3") return GateKind::kU3;
  if (name == "PHASE") return GateKind::kPhase;
  fail("bad_gate", "unknown gate kind: " + name);
}

bool Gate::operator==(const Gate& other) const {
  return kind == other.kind && q0 == other.q0 && q1 == other.q1 &&
         params == other.params;
}

}  // namespace reducechop
