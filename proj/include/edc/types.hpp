// include/edc/types.hpp

// Copyright 2026  The EDC Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edc {

inline constexpr const char* kVersion = "0.1.0";

// Spectrogram-shaped data is time-major: one row per frame.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Root of the error taxonomy. The CLI maps each leaf to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or a violated call contract (exit code 2).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures: missing, unreadable or unwritable files (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data: non-finite values, shape mismatches (exit code 4).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A file whose container layout is broken (bad magic, truncated header, ...).
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// A well-formed file in an encoding this toolkit does not decode.
class UnsupportedEncoding : public FormatError {
 public:
  using FormatError::FormatError;
};

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw DataError(std::string(what) + ": input contains NaN or Inf");
  }
}

}  // namespace edc
