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

#ifndef REDUCECHOP_GATE_HPP
#define REDUCECHOP_GATE_HPP

#include <array>
#include <complex>
#include <string>

namespace reducechop {

enum class GateKind { kH, kX, kCnot, kCz, kRx, kRz, kZz, kU3, kPhase };

// One gate instance. Single-qubit gates use q0; two-qubit gates use
// (q0, q1) with q0 the control for CNOT. Angle conventions:
//   RX(t) = exp(-i t X / 2)        RZ(t) = exp(-i t Z / 2)
//   ZZ(t) = exp(-i t Z (x) Z / 2)  PHASE(t) = diag(1, exp(i t))
//   U3(a, b, g) = [[cos(a/2), -exp(ig) sin(a/2)],
//                  [exp(ib) sin(a/2), exp(i(b+g)) cos(a/2)]]
struct Gate {
  GateKind kind = GateKind::kH;
  int q0 = -1;
  int q1 = -1;
  std::array<double, 3> params{0.0, 0.0, 0.0};

  static Gate h(int q);
  static Gate x(int q);
  static Gate cnot(int control, int target);
  static Gate cz(int a, int b);
  static Gate rx(int q, double theta);
  static Gate rz(int q, double theta);
  static Gate zz(int a, int b, double theta);
  static Gate u3(int q, double alpha, double beta, double gamma);
  static Gate phase(int q, double phi);

  int arity() const;
  int param_count() const;
  bool is_diagonal() const;

  // Inverse gate of the same kind family.
  Gate dagger() const;

  // Dense matrix, row-major. matrix1 for arity 1, matrix2 for arity 2
  // with basis order |q0 q1> in {00, 01, 10, 11}.
  std::array<std::complex<double>, 4> matrix1() const;
  std::array<std::complex<double>, 16> matrix2() const;

  std::string kind_name() const;
  static GateKind kind_from_name(const std::string& name);

  bool operator==(const Gate& other) const;
};

}  // namespace reducechop

#endif
