// Copyright 2026 The qconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Tensor / convolution dimensions are inconsistent or out of range.
class ShapeError : public Error {
   public:
    using Error::Error;
};

/// Two states or vectors that must share a dimension do not.
class DimensionMismatchError : public Error {
   public:
    using Error::Error;
};

/// Amplitude encoding of a vector with zero norm.
class ZeroVectorError : public Error {
   public:
    using Error::Error;
};

/// Shot plan or precision parameters out of range.
class InvalidPlanError : public Error {
   public:
    using Error::Error;
};

/// No (row, column) pair survives zero filtering in a batched run.
class DegenerateError : public Error {
   public:
    using Error::Error;
};

/// Non-finite or otherwise unusable numeric data.
class ValueError : public Error {
   public:
    using Error::Error;
};

/// Malformed tensor, matrix, or result file.
class ParseError : public Error {
   public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace qconv
