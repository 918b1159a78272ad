// Copyright 2026 The memsel Authors.
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

#ifndef MEMSEL_ERRORS_HPP_
#define MEMSEL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace memsel {

// Base for all recoverable library errors. Precondition violations on
// numeric arguments throw std::domain_error / std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text could not be parsed. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A state label that is not part of the declared alphabet.
class UnknownLabelError : public ParseError {
 public:
  using ParseError::ParseError;
};

// No trajectories were supplied.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace memsel

#endif  // MEMSEL_ERRORS_HPP_
