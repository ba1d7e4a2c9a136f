// Copyright 2026 The terranav Authors
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

#include "terranav/error.hpp"

namespace terranav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBoundary: return "boundary";
    case ErrorCode::kSlopeCap: return "slope_cap";
    case ErrorCode::kAttitudeSingularity: return "attitude_singularity";
    case ErrorCode::kDegenerateLoad: return "degenerate_load";
    case ErrorCode::kConditioning: return "conditioning";
    case ErrorCode::kIngestion: return "ingestion";
    case ErrorCode::kInsufficientSamples: return "insufficient_samples";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kRegistry: return "registry";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace terranav
