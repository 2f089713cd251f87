// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/error.hpp"

namespace roi {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::BrokenTrack: return "BrokenTrack";
    case ErrorCode::UnsupportedCameraModel: return "UnsupportedCameraModel";
    case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
    case ErrorCode::PixelOutOfBounds: return "PixelOutOfBounds";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::NoUsableView: return "NoUsableView";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::SetTooSmall: return "SetTooSmall";
    case ErrorCode::IntervalOverlapUnresolved: return "IntervalOverlapUnresolved";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedMode: return "UnsupportedMode";
    case ErrorCode::NumericalDomainError: return "NumericalDomainError";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile:
    case ErrorCode::Io:
    case ErrorCode::MalformedLine:
    case ErrorCode::MalformedJson:
    case ErrorCode::SchemaVersionMismatch:
    case ErrorCode::CorruptHeader:
    case ErrorCode::ChecksumMismatch:
      return ErrorCategory::Io;
    case ErrorCode::NumericalDomainError:
    case ErrorCode::DivergedLoss:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Validation;
  }
}

}  // namespace roi
