/*
 * Copyright 2026 The DGCDR Toolkit Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgcdr {

// Root of every exception raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or insufficient input data. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or command usage (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite objective (exit code 3).
class Diverged : public Error {
 public:
  explicit Diverged(int epoch);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class MalformedLine : public DataError {
 public:
  MalformedLine(std::size_t line_no, const std::string& detail);
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class EmptyFile : public DataError {
 public:
  explicit EmptyFile(const std::string& path);
};

class ExhaustedDataset : public DataError {
 public:
  explicit ExhaustedDataset(unsigned n_core);
};

class TooFewInteractions : public DataError {
 public:
  using DataError::DataError;
};

class IsolatedNode : public DataError {
 public:
  using DataError::DataError;
};

class NoNegativeAvailable : public DataError {
 public:
  explicit NoNegativeAvailable(int user);
  int user() const { return user_; }

 private:
  int user_;
};

class NoTestItems : public DataError {
 public:
  explicit NoTestItems(int user);
};

class DensityUnreachable : public DataError {
 public:
  using DataError::DataError;
};

class EmptyRelevantSet : public Error {
 public:
  EmptyRelevantSet();
};

class ShapeMismatch : public Error {
 public:
  ShapeMismatch(const std::string& op, long lhs_rows, long lhs_cols, long rhs_rows,
                long rhs_cols);
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class ZeroDimension : public Error {
 public:
  ZeroDimension();
};

class NonFiniteGradient : public Error {
 public:
  explicit NonFiniteGradient(const std::string& parameter);
  const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

}  // namespace dgcdr
