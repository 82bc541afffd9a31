// Copyright 2026 The pdw Authors
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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pdw {

struct WerResult {
  double wer = 0.0;  // (S + D + I) / reference length
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_words = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Minimal unit-cost edit alignment. Among optimal alignments the split
// follows a backtrace preferring substitution (or match) over deletion
// over insertion. Throws InvalidArgument on an empty reference.
WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis);

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace pdw
