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

#ifndef EDGETWIN__ERROR_HPP_
#define EDGETWIN__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgetwin
{

enum class ErrorCode {
  // trace_model
  MissingColumn,
  NonContiguousVehicle,
  NonMonotoneFrames,
  InvalidRow,
  EmptyTrace,
  InfeasibleDensity,
  UnknownVehicle,
  FrameOutOfRange,
  // forecaster
  InsufficientHistory,
  EmptyDataset,
  DimensionMismatch,
  EmptyErrors,
  MissingModel,
  BadModelFile,
  // box_allocator
  OutOfSegment,
  MixedFrames,
  StaleMap,
  UnreachableBox,
  // pipeline
  TraceTooShort,
  MissingHorizonModel,
  // generic
  BadParams,
  ConfigError,
  IoError,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

/// Broad class of an error, used by the CLI to pick an exit status.
enum class ErrorCategory { Config, Data, Internal };

ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace edgetwin

#endif  // EDGETWIN__ERROR_HPP_
