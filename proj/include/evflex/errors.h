// Copyright 2026 The evflex Authors
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

#ifndef EVFLEX_ERRORS_H_
#define EVFLEX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace evflex {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (length mismatch, bad ranges, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Unreadable files or documents that do not follow the expected format.
class IoError : public Error {
 public:
  using Error::Error;
};

// A flexibility set intersected with a feeder box is empty.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string node, const std::string& what)
      : Error(what), node_(std::move(node)) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// A profile handed to disaggregation is not in the aggregate set.
class MembershipError : public Error {
 public:
  using Error::Error;
};

// An iterative solver (min-norm point, Frank-Wolfe) stopped without a
// certified answer.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace evflex

#endif  // EVFLEX_ERRORS_H_
