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

#ifndef REDUCECHOP_ERROR_HPP
#define REDUCECHOP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace reducechop {

// All contract violations raise this type. `kind` is a stable,
// machine-readable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& message) {
  throw Error(std::move(kind), message);
}

}  // namespace reducechop

#endif
