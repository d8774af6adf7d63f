// Copyright 2026 The Vessel Eval Authors.
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

#ifndef VESSEL_EVAL_SRC_STR_CAT_H_
#define VESSEL_EVAL_SRC_STR_CAT_H_

#include <sstream>
#include <string>

namespace vessel_eval {

// Message concatenation. The system absl predates std::string_view
// interoperability, so absl::StrCat cannot take the std::string_view values
// used throughout this library.
template <typename... Args>
std::string StrCat(const Args&... args) {
  std::ostringstream out;
  (out << ... << args);
  return out.str();
}

template <typename Range>
std::string StrJoin(const Range& parts, const std::string& separator) {
  std::string out;
  bool first = true;
  for (const auto& part : parts) {
    if (!first) out += separator;
    out += part;
    first = false;
  }
  return out;
}

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_SRC_STR_CAT_H_
