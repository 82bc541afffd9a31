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

#include <filesystem>
#include <string>
#include <vector>

#include "pdw/audio.hpp"
#include "pdw/fft.hpp"
#include "pdw/manifest.hpp"

namespace pdw {

struct KenansvilleParams {
  double target_snr_db = 20.0;

  // Throws InvalidArgument unless finite and > 0.
  void validate() const;
};

// One conjugate-symmetric group of DFT bins. DC and (for even N) Nyquist
// are singletons with mirror == bin; every other group is (k, N-k).
struct BinGroup {
  std::size_t bin = 0;
  std::size_t mirror = 0;
  double power = 0.0;  // |X[k]|^2 (+ |X[N-k]|^2)
};

// Groups in ascending bin order, k = 0 .. floor(N/2).
std::vector<BinGroup> conjugate_groups(const ComplexSpectrum& spectrum);

// Which groups the attack removes: the longest prefix of the
// (power, bin)-ascending order whose cumulative power keeps
// 10*log10(E_total / removed) >= target.
struct RemovalPlan {
  std::vector<std::size_t> removed_bins;  // lead bin of each removed group, in removal order
  double removed_power = 0.0;
  double total_power = 0.0;
};

RemovalPlan plan_removal(const ComplexSpectrum& spectrum, double target_snr_db);

struct AttackResult {
  AudioBuffer adversarial;
  SnrDb achieved_snr = SnrDb::infinite();
  RemovalPlan plan;
};

// Whole-utterance spectral thresholding attack. If the removal carries no
// power the input is returned bit-for-bit with the infinite SNR sentinel.
AttackResult kenansville_attack(const AudioBuffer& signal, const KenansvilleParams& params);

struct BatchFailure {
  std::string id;
  std::string reason;
};

struct AttackBatchResult {
  Manifest manifest;
  std::vector<BatchFailure> failures;
};

// Attacks every entry, writing <out_dir>/<id>.wav (float32) and
// <out_dir>/manifest.tsv. Per-file failures are collected; the batch continues.
AttackBatchResult attack_corpus(const Manifest& manifest, const KenansvilleParams& params,
                                const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace pdw
