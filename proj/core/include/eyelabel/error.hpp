// Copyright 2026 The eyelabel Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace eyelabel {

/// Base of every exception thrown by the library. Each module derives a
/// typed error carrying a `kind()` so callers can branch without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Kind>
class TypedError : public Error {
 public:
  TypedError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace eyelabel
