/*
 * Copyright 2026 The Hearthcast Authors.
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

#ifndef HEARTHCAST_ERRORS_HPP_
#define HEARTHCAST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hearthcast {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not follow the expected layout (missing column, bad header).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value violates a domain invariant (unknown category, negative surface...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Fewer meter reading days than the annualization window requires.
class InsufficientWindowError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid configuration or hyperparameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Model file that cannot be decoded, or a model used in an unsupported way.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_ERRORS_HPP_
