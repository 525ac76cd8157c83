// Copyright 2026 The edgetwin Authors
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

#include "edgetwin/error.hpp"

namespace edgetwin
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonContiguousVehicle: return "NonContiguousVehicle";
    case ErrorCode::NonMonotoneFrames: return "NonMonotoneFrames";
    case ErrorCode::InvalidRow: return "InvalidRow";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::InfeasibleDensity: return "InfeasibleDensity";
    case ErrorCode::UnknownVehicle: return "UnknownVehicle";
    case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyErrors: return "EmptyErrors";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::BadModelFile: return "BadModelFile";
    case ErrorCode::OutOfSegment: return "OutOfSegment";
    case ErrorCode::MixedFrames: return "MixedFrames";
    case ErrorCode::StaleMap: return "StaleMap";
    case ErrorCode::UnreachableBox: return "UnreachableBox";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::MissingHorizonModel: return "MissingHorizonModel";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code)
{
  switch (code) {
    case ErrorCode::BadParams:
    case ErrorCode::ConfigError:
      return ErrorCategory::Config;
    case ErrorCode::InvariantViolation:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string & what)
: std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

}  // namespace edgetwin
