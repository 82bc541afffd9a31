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

#include "pdw/wer.hpp"

#include <algorithm>

#include "pdw/error.hpp"

namespace pdw {
namespace {

// Cost plus the S/D/I split of the alignment the backtrace would pick.
struct Cell {
  std::size_t cost = 0;
  std::size_t s = 0, d = 0, i = 0;
};

}  // namespace

// A backtrace from (n, m) picks the diagonal when it is optimal, else the
// deletion, else the insertion. Carrying the split forward with the same
// preference at every cell reproduces that path with two rows of storage.
WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis) {
  if (reference.empty()) throw InvalidArgument("wer: empty reference");
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, 0, 0, j};
  for (std::size_t r = 1; r <= n; ++r) {
    cur[0] = {r, 0, r, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool match = reference[r - 1] == hypothesis[j - 1];
      const std::size_t diag = prev[j - 1].cost + (match ? 0 : 1);
      const std::size_t del = prev[j].cost + 1;
      const std::size_t ins = cur[j - 1].cost + 1;
      if (diag <= del && diag <= ins) {
        cur[j] = prev[j - 1];
        cur[j].cost = diag;
        if (!match) ++cur[j].s;
      } else if (del <= ins) {
        cur[j] = prev[j];
        cur[j].cost = del;
        ++cur[j].d;
      } else {
        cur[j] = cur[j - 1];
        cur[j].cost = ins;
        ++cur[j].i;
      }
    }
    std::swap(prev, cur);
  }
  const Cell& last = prev[m];
  WerResult out;
  out.substitutions = last.s;
  out.deletions = last.d;
  out.insertions = last.i;
  out.reference_words = n;
  out.wer = static_cast<double>(last.cost) / static_cast<double>(n);
  return out;
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t r = 1; r <= a.size(); ++r) {
    cur[0] = r;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (a[r - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace pdw
