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

#include <cstdint>
#include <span>
#include <vector>

#include "pdw/embedding.hpp"
#include "pdw/stft.hpp"

namespace pdw {

// Floor applied to STFT magnitudes inside logs and magnitude gradients.
inline constexpr double kMagnitudeFloor = 1e-7;

struct LossValueAndGrad {
  double value = 0.0;
  std::vector<double> grad;  // d value / d estimate, same length as the estimate
};

struct LossWeights {
  double alpha = 0.45;  // waveform L1
  double beta = 0.45;   // multi-resolution STFT
  double gamma = 0.45;  // perceptual distance

  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct MultiResConfig {
  std::vector<StftResolution> resolutions;

  // (512, 50, 240), (1024, 120, 600), (2048, 240, 1200)
  static MultiResConfig standard();
  void validate() const;
  friend bool operator==(const MultiResConfig&, const MultiResConfig&) = default;
};

// Records which side of every non-smooth point (absolute value, rectifier,
// magnitude floor) an evaluation landed on. Two evaluations with equal
// hashes used the same smooth branch everywhere; finite-difference checks
// use this to skip coordinates that straddle a kink. Complex values whose
// modulus is taken are kept as well: |c| has no sides, so closeness to its
// kink at c = 0 is judged by how far a perturbation moves c.
class KinkTrace {
 public:
  void mix(bool bit) {
    hash_ ^= bit ? 0x9e3779b97f4a7c15ULL : 0x7f4a7c159e3779b9ULL;
    hash_ = (hash_ << 7 | hash_ >> 57) * 0x100000001b3ULL;
  }
  void modulus(const Complex& c) { moduli_.push_back(c); }
  std::uint64_t hash() const { return hash_; }
  const std::vector<Complex>& moduli() const { return moduli_; }
  std::vector<Complex> take_moduli() { return std::move(moduli_); }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  std::vector<Complex> moduli_;
};

// sum_i |y_i - yhat_i|; grad_i = -sign(y_i - yhat_i) with sign(0) = 0.
LossValueAndGrad l1_loss(std::span<const double> y, std::span<const double> yhat,
                         KinkTrace* trace = nullptr);

// || |S(y)| - |S(yhat)| ||_F / || |S(y)| ||_F
LossValueAndGrad spectral_convergence(std::span<const double> y, std::span<const double> yhat,
                                      const StftResolution& res, KinkTrace* trace = nullptr);

// (1/T) sum |log max(|S(y)|, eps) - log max(|S(yhat)|, eps)| with T the
// number of spectrogram elements (frames x bins).
LossValueAndGrad log_stft_magnitude(std::span<const double> y, std::span<const double> yhat,
                                    const StftResolution& res, KinkTrace* trace = nullptr);

// Magnitude-level core of log_stft_magnitude: value and gradient with
// respect to the estimate magnitudes.
LossValueAndGrad log_magnitude_distance(std::span<const double> ref_mag,
                                        std::span<const double> est_mag,
                                        KinkTrace* trace = nullptr);

// spectral_convergence + log_stft_magnitude at one resolution.
LossValueAndGrad stft_loss(std::span<const double> y, std::span<const double> yhat,
                           const StftResolution& res, KinkTrace* trace = nullptr);

LossValueAndGrad multi_res_stft_loss(std::span<const double> y, std::span<const double> yhat,
                                     const MultiResConfig& config, KinkTrace* trace = nullptr);

// Sum over layers of the mean absolute activation difference. The
// embedding only receives reads; gradients flow to yhat alone.
LossValueAndGrad perceptual_distance(std::span<const double> y, std::span<const double> yhat,
                                     const PerceptualEmbedding& embedding,
                                     KinkTrace* trace = nullptr);

// alpha*L1 + beta*multi-res STFT + gamma*D. Components with zero weight
// are not evaluated.
LossValueAndGrad composite_loss(std::span<const double> y, std::span<const double> yhat,
                                const LossWeights& weights, const MultiResConfig& config,
                                const PerceptualEmbedding& embedding,
                                KinkTrace* trace = nullptr);

}  // namespace pdw
