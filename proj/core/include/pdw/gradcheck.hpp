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

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pdw {

struct GradCheckOptions {
  double step = 1e-5;
  std::size_t max_coords = 32;  // sampled coordinates per tensor (0 = all)
  double tolerance = 1e-3;
  // A coordinate is skipped when a shift moves some modulus argument c by
  // more than this fraction of |c|.
  double modulus_ratio = 0.02;
};

struct GradCheckEntry {
  std::string name;       // "loss/l1", "denoiser/encoder.0.weight", ...
  double rel_error = 0.0; // ||analytic - numeric|| / ||numeric|| over checked coordinates
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose +-h evaluations crossed a kink
  bool passed() const;
  double tolerance = 1e-3;
};

// Value plus a hash of every non-smooth branch taken during evaluation and
// the arguments of every complex modulus, in evaluation order.
struct Evaluation {
  double value = 0.0;
  std::uint64_t kink_hash = 0;
  std::vector<std::complex<double>> moduli;
};

// Central differences of f at x over the coordinates in `coords`, compared
// norm-wise with `analytic`. A coordinate is skipped when either shifted
// evaluation lands on a different branch than the unshifted one, or moves a
// modulus argument too close to zero relative to its size.
GradCheckEntry check_gradient(const std::string& name, std::vector<double> x,
                              std::span<const double> analytic,
                              const std::function<Evaluation(std::span<const double>)>& f,
                              const std::vector<std::size_t>& coords,
                              const GradCheckOptions& options);

// Full suite: every loss (value gradients w.r.t. the estimate) and every
// parameter tensor of a tiny denoiser under the composite loss.
std::vector<GradCheckEntry> run_gradcheck_suite(std::uint64_t seed,
                                                const GradCheckOptions& options = {});

}  // namespace pdw
