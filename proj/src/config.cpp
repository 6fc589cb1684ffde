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

#include "reducechop/config.hpp"

#include <cstdlib>
#include <string>

#include "reducechop/error.hpp"

namespace reducechop {

namespace {

int read_max_qubits() {
  const char* raw = std::getenv("REDUCECHOP_MAX_QUBITS");
  if (raw == nullptr) return 14;
  try {
    std::size_t used = 0;
    int value = std::stoi(raw, &used);
    if (used != std::string(raw).size() || value < 1 || value > 30) {
      fail("bad_env", "REDUCECHOP_MAX_QUBITS must be an integer in [1, 30]");
    }
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("bad_env", "REDUCECHOP_MAX_QUBITS must be an integer in [1, 30]");
  }
}

}  // namespace

int max_qubits() {
  static const int cap = read_max_qubits();
  return cap;
}

}  // namespace reducechop
