// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace roi {

enum class ErrorCode {
  // I/O and parsing
  MissingFile,
  Io,
  MalformedLine,
  MalformedJson,
  SchemaVersionMismatch,
  CorruptHeader,
  ChecksumMismatch,
  // Validation
  BrokenTrack,
  UnsupportedCameraModel,
  DegenerateOrbit,
  PixelOutOfBounds,
  ResolutionTooSmall,
  NoUsableView,
  EmptyTrainingSet,
  EmptyRoi,
  SetTooSmall,
  IntervalOverlapUnresolved,
  ResolutionMismatch,
  DimensionMismatch,
  ImageTooSmall,
  EmptyMask,
  InvalidArgument,
  UnsupportedMode,
  // Numeric
  NumericalDomainError,
  DivergedLoss,
};

enum class ErrorCategory { Io, Validation, Numeric };

const char* to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (CLI exit codes, HTTP status mapping, tests) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace roi
