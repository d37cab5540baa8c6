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

#ifndef HALTRAG_ERROR_H_
#define HALTRAG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace haltrag {

// Every failure contract in the library maps to one of these kinds.
enum class ErrorKind {
  kArgument,
  kConfiguration,
  kParse,
  kFormat,
  kVersion,
  kDegenerateInput,
  kDegenerateLabels,
  kInput,
  kMissingScore,
  kValidation,
  kStratification,
  kInfeasible,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace haltrag

#endif  // HALTRAG_ERROR_H_
