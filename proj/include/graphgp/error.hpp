/*
 * Copyright 2026 The graphgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRAPHGP_ERROR_HPP
#define GRAPHGP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace graphgp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, shapes or parameters. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A node without edges where the normalized Laplacian needs D^{-1/2}.
class DegreeZeroError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Non-finite or otherwise broken arithmetic. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The symmetric eigensolver did not converge.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// File system and parse failures. CLI exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphgp

#endif  // GRAPHGP_ERROR_HPP
