// Copyright 2026 The HALT-RAG Authors.
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

#include "haltrag/error.h"

namespace haltrag {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kVersion: return "versioned-format error";
    case ErrorKind::kDegenerateInput: return "degenerate-input error";
    case ErrorKind::kDegenerateLabels: return "degenerate-labels error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kMissingScore: return "missing-score error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kStratification: return "stratification error";
    case ErrorKind::kInfeasible: return "infeasible-constraint error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind),
      detail_(message) {}

}  // namespace haltrag
