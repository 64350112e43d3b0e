// Copyright 2026 The lsw Authors. All rights reserved.
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

#include "lsw/error.hpp"

namespace lsw {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kIntegrationFailure: return "integration-failure";
    case ErrorCode::kRefinementFailure: return "refinement-failure";
    case ErrorCode::kDegenerateSolution: return "degenerate-solution";
    case ErrorCode::kAmbiguousSymbol: return "ambiguous-symbol";
    case ErrorCode::kNonPrimitive: return "non-primitive";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kSingularSystem: return "singular-system";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kIncompleteLibrary: return "incomplete-library";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace lsw
