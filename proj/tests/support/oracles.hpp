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

// Straightforward reference implementations used as test oracles. They
// share no code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace pdw::testing {

using Cplx = std::complex<double>;

// O(N^2) direct-summation DFT.
inline std::vector<Cplx> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<Cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Cplx acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += x[t] * Cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> naive_idft_real(const std::vector<Cplx>& X) {
  const std::size_t n = X.size();
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    Cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += X[k] * Cplx(std::cos(ang), std::sin(ang));
    }
    out[t] = acc.real() / static_cast<double>(n);
  }
  return out;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> x(n);
  for (double& v : x) v = dist(eng);
  return x;
}

inline std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> x(n);
  for (double& v : x) v = dist(eng);
  return x;
}

inline double sum_sq(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Independent greedy removal: visits conjugate groups by ascending
// (power, lead bin) and keeps taking them while the cumulative removed power
// stays within total * 10^(-target/10). Returns lead bins in visit order.
inline std::vector<std::size_t> greedy_removal(const std::vector<Cplx>& bins, double target_db) {
  const std::size_t n = bins.size();
  double total = 0.0;
  for (const auto& b : bins) total += std::norm(b);
  std::vector<std::pair<double, std::size_t>> groups;
  for (std::size_t k = 0; 2 * k <= n; ++k) {
    double p = std::norm(bins[k]);
    if (k != 0 && 2 * k != n) p += std::norm(bins[n - k]);
    groups.emplace_back(p, k);
  }
  std::sort(groups.begin(), groups.end());
  const double budget = total * std::pow(10.0, -target_db / 10.0);
  std::vector<std::size_t> out;
  double removed = 0.0;
  for (const auto& [p, k] : groups) {
    if (removed + p > budget) break;
    removed += p;
    out.push_back(k);
  }
  return out;
}

// Exhaustive search over every subset of conjugate groups for the
// maximum-power subset within the budget; ties go to the subset that comes
// first in greedy order. Only practical for short signals.
inline std::vector<std::size_t> brute_force_removal(const std::vector<Cplx>& bins, double target_db) {
  const std::size_t n = bins.size();
  double total = 0.0;
  for (const auto& b : bins) total += std::norm(b);
  std::vector<std::pair<double, std::size_t>> groups;
  for (std::size_t k = 0; 2 * k <= n; ++k) {
    double p = std::norm(bins[k]);
    if (k != 0 && 2 * k != n) p += std::norm(bins[n - k]);
    groups.emplace_back(p, k);
  }
  std::sort(groups.begin(), groups.end());
  const double budget = total * std::pow(10.0, -target_db / 10.0) * (1.0 + 1e-12);
  const std::size_t g = groups.size();
  double best = -1.0;
  std::size_t best_mask = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << g); ++mask) {
    double p = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      if (mask & (std::size_t{1} << i)) p += groups[i].first;
    }
    if (p > budget || p <= best) continue;
    best = p;
    best_mask = mask;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g; ++i) {
    if (best_mask & (std::size_t{1} << i)) out.push_back(groups[i].second);
  }
  return out;
}

struct EditSplit {
  std::size_t distance = 0, substitutions = 0, deletions = 0, insertions = 0;
};

// Full (n+1) x (m+1) edit-distance matrix with a backtrace from the corner
// that prefers the diagonal, then deletion, then insertion.
inline EditSplit full_matrix_edit(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u), d[i - 1][j] + 1,
                          d[i][j - 1] + 1});
    }
  }
  EditSplit out;
  out.distance = d[n][m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u)) {
      if (ref[i - 1] != hyp[j - 1]) ++out.substitutions;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++out.deletions;
      --i;
    } else {
      ++out.insertions;
      --j;
    }
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Unique scratch directory under the system temp dir, removed on scope exit.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pdw-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace pdw::testing
