/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCOMP_ERROR_HPP_
#define PCOMP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pcomp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed, missing or schema-violating input (files, configs, arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

// A quantity that is mathematically undefined for the given data, or an
// operation whose preconditions on numeric input are not met.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcomp

#endif  // PCOMP_ERROR_HPP_
