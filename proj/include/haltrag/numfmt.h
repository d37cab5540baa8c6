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

#ifndef HALTRAG_NUMFMT_H_
#define HALTRAG_NUMFMT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace haltrag {

// Shortest decimal text that parses back to the identical double.
std::string FormatRoundTrip(double value);
// Fixed 17 significant digits; also round-trips.
std::string FormatDigits17(double value);

std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInt(std::string_view text);

std::vector<std::string_view> SplitView(std::string_view text, char sep);
std::string_view Trim(std::string_view text);

}  // namespace haltrag

#endif  // HALTRAG_NUMFMT_H_
