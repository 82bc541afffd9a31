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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "pdw/embedding.hpp"
#include "pdw/error.hpp"
#include "pdw/gradcheck.hpp"
#include "pdw/losses.hpp"
#include "support/oracles.hpp"

namespace pdw {
namespace {

using Vec = std::vector<double>;

const StftResolution kRes{512, 50, 240};

// Reference STFT magnitudes: periodic Hann, reflection padding, direct DFT.
std::vector<double> ref_stft_mag(const Vec& x, const StftResolution& r) {
  const long long len = static_cast<long long>(x.size());
  const long long pad = static_cast<long long>(r.window_len / 2);
  const std::size_t frames = (x.size() + 2 * r.window_len / 2 - r.window_len) / r.hop + 1;
  const std::size_t bins = r.fft_size / 2 + 1;
  auto at = [&](long long i) {
    while (i < 0 || i >= len) i = i < 0 ? -i : 2 * (len - 1) - i;
    return x[static_cast<std::size_t>(i)];
  };
  std::vector<double> mag(frames * bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const long long start = static_cast<long long>(t * r.hop) - pad;
    std::vector<double> seg(r.window_len);
    for (std::size_t n = 0; n < r.window_len; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                            static_cast<double>(r.window_len));
      seg[n] = w * at(start + static_cast<long long>(n));
    }
    for (std::size_t k = 0; k < bins; ++k) {
      testing::Cplx acc(0, 0);
      for (std::size_t n = 0; n < r.window_len; ++n) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * n) % r.fft_size) /
                           static_cast<double>(r.fft_size);
        acc += seg[n] * testing::Cplx(std::cos(ang), std::sin(ang));
      }
      mag[t * bins + k] = std::abs(acc);
    }
  }
  return mag;
}

double ref_sc(const Vec& y, const Vec& yhat, const StftResolution& r) {
  const auto a = ref_stft_mag(y, r), b = ref_stft_mag(yhat, r);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

double ref_logmag(const Vec& y, const Vec& yhat, const StftResolution& r) {
  const auto a = ref_stft_mag(y, r), b = ref_stft_mag(yhat, r);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += std::abs(std::log(std::max(a[i], 1e-7)) - std::log(std::max(b[i], 1e-7)));
  }
  return s / static_cast<double>(a.size());
}

// Reference evaluator of the embedding: valid stride-4 convolutions with a
// leaky rectifier, read straight from the stored weights.
std::vector<std::vector<double>> ref_embed(const PerceptualEmbedding& e, const Vec& x) {
  std::vector<std::vector<double>> acts;
  std::vector<double> in = x;
  std::size_t in_len = x.size();
  for (std::size_t l = 0; l < e.layer_count(); ++l) {
    const auto& s = e.layer_spec(l);
    const auto w = e.weights(l);
    const auto b = e.biases(l);
    const std::size_t out_len = (in_len - s.kernel) / PerceptualEmbedding::kStride + 1;
    std::vector<double> out(s.out_channels * out_len);
    for (std::size_t o = 0; o < s.out_channels; ++o) {
      for (std::size_t t = 0; t < out_len; ++t) {
        double acc = b[o];
        for (std::size_t i = 0; i < s.in_channels; ++i) {
          for (std::size_t k = 0; k < s.kernel; ++k) {
            acc += w[(o * s.in_channels + i) * s.kernel + k] *
                   in[i * in_len + t * PerceptualEmbedding::kStride + k];
          }
        }
        out[o * out_len + t] = acc > 0 ? acc : 0.1 * acc;
      }
    }
    acts.push_back(out);
    in = std::move(out);
    in_len = out_len;
  }
  return acts;
}

double ref_perceptual(const PerceptualEmbedding& e, const Vec& y, const Vec& yhat) {
  const auto a = ref_embed(e, y), b = ref_embed(e, yhat);
  double total = 0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    double s = 0;
    for (std::size_t j = 0; j < a[l].size(); ++j) s += std::abs(a[l][j] - b[l][j]);
    total += s / static_cast<double>(a[l].size());
  }
  return total;
}

using LossFn = std::function<LossValueAndGrad(const Vec&, KinkTrace*)>;

// Central differences on a sample of coordinates, skipping any whose
// shifted evaluations take a different non-smooth branch. Norm-wise error.
double fd_rel_error(const LossFn& f, Vec x, std::size_t coords, std::uint64_t seed,
                    std::size_t* checked = nullptr) {
  KinkTrace base_trace;
  const Vec analytic = f(x, &base_trace).grad;
  const auto picks = testing::uniform(coords, seed, 0.0, static_cast<double>(x.size()));
  double num = 0, den = 0;
  std::size_t n = 0;
  const double h = 1e-5;
  for (double p : picks) {
    const auto i = static_cast<std::size_t>(p);
    const double orig = x[i];
    KinkTrace tp, tm;
    x[i] = orig + h;
    const double fp = f(x, &tp).value;
    x[i] = orig - h;
    const double fm = f(x, &tm).value;
    x[i] = orig;
    if (tp.hash() != base_trace.hash() || tm.hash() != base_trace.hash()) continue;
    const double numeric = (fp - fm) / (2 * h);
    num += (numeric - analytic[i]) * (numeric - analytic[i]);
    den += numeric * numeric;
    ++n;
  }
  if (checked) *checked = n;
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

const PerceptualEmbedding& embedding() {
  static const PerceptualEmbedding e = PerceptualEmbedding::from_seed(99);
  return e;
}

// ---- L1 ----

TEST(L1, EqualInputsGiveZero) {
  const Vec y = testing::gaussian(50, 1);
  const auto r = l1_loss(y, y);
  EXPECT_EQ(r.value, 0.0);
  for (double g : r.grad) EXPECT_EQ(g, 0.0);
}

TEST(L1, HandArithmetic) {
  const auto r = l1_loss(Vec{0.5, -0.5}, Vec{0.0, 0.0});
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.grad, (Vec{-1.0, 1.0}));
}

TEST(L1, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(128, 2), yh = testing::gaussian(128, 3);
  std::size_t checked = 0;
  const double err = fd_rel_error([&](const Vec& x, KinkTrace* t) { return l1_loss(y, x, t); }, yh,
                                  128, 4, &checked);
  EXPECT_LT(err, 1e-4);
  EXPECT_GT(checked, 60u);
}

TEST(L1, LengthMismatchRejected) {
  EXPECT_THROW(l1_loss(Vec{1, 2}, Vec{1}), InvalidArgument);
  EXPECT_THROW(l1_loss(Vec{}, Vec{}), InvalidArgument);
}

// ---- Spectral convergence ----

TEST(SpectralConvergence, ZeroCases) {
  const Vec y = testing::gaussian(800, 5);
  EXPECT_EQ(spectral_convergence(y, y, kRes).value, 0.0);
  EXPECT_DOUBLE_EQ(spectral_convergence(y, Vec(800, 0.0), kRes).value, 1.0);
}

TEST(SpectralConvergence, MatchesReferenceValue) {
  const Vec y = testing::gaussian(800, 6), yh = testing::gaussian(800, 7);
  EXPECT_NEAR(spectral_convergence(y, yh, kRes).value, ref_sc(y, yh, kRes), 1e-10);
}

TEST(SpectralConvergence, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(800, 8), yh = testing::gaussian(800, 9);
  EXPECT_LT(fd_rel_error([&](const Vec& x, KinkTrace* t) { return spectral_convergence(y, x, kRes, t); },
                         yh, 40, 10),
            1e-3);
}

TEST(SpectralConvergence, ZeroReferenceRejected) {
  EXPECT_THROW(spectral_convergence(Vec(800, 0.0), testing::gaussian(800, 1), kRes), InvalidArgument);
}

// ---- Log magnitude ----

TEST(LogMagnitude, EqualInputsGiveZero) {
  const Vec y = testing::gaussian(800, 11);
  EXPECT_EQ(log_stft_magnitude(y, y, kRes).value, 0.0);
}

TEST(LogMagnitude, SingleFrameToy) {
  const double e = std::exp(1.0);
  const auto r = log_magnitude_distance(Vec{e, e}, Vec{1.0, 1.0});
  EXPECT_NEAR(r.value, 1.0, 1e-15);
  EXPECT_NEAR(r.grad[0], -0.5, 1e-15);
  EXPECT_NEAR(r.grad[1], -0.5, 1e-15);
}

TEST(LogMagnitude, MatchesReferenceValue) {
  const Vec y = testing::gaussian(800, 12), yh = testing::gaussian(800, 13);
  EXPECT_NEAR(log_stft_magnitude(y, yh, kRes).value, ref_logmag(y, yh, kRes), 1e-10);
}

TEST(LogMagnitude, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(800, 14), yh = testing::gaussian(800, 15);
  EXPECT_LT(fd_rel_error([&](const Vec& x, KinkTrace* t) { return log_stft_magnitude(y, x, kRes, t); },
                         yh, 40, 16),
            1e-3);
}

TEST(LogMagnitude, GradientIsFiniteOnSilence) {
  const Vec y = testing::gaussian(800, 17);
  for (double g : log_stft_magnitude(y, Vec(800, 0.0), kRes).grad) EXPECT_TRUE(std::isfinite(g));
}

// ---- STFT and multi-resolution ----

TEST(StftLoss, IsTheSumOfItsParts) {
  const Vec y = testing::gaussian(800, 18), yh = testing::gaussian(800, 19);
  const auto sc = spectral_convergence(y, yh, kRes);
  const auto mag = log_stft_magnitude(y, yh, kRes);
  const auto both = stft_loss(y, yh, kRes);
  EXPECT_NEAR(both.value, sc.value + mag.value, 1e-12);
  for (std::size_t i = 0; i < both.grad.size(); ++i) {
    EXPECT_NEAR(both.grad[i], sc.grad[i] + mag.grad[i], 1e-12);
  }
  EXPECT_EQ(stft_loss(y, y, kRes).value, 0.0);
}

TEST(MultiRes, SingleResolutionEqualsStftLoss) {
  const Vec y = testing::gaussian(900, 20), yh = testing::gaussian(900, 21);
  EXPECT_EQ(multi_res_stft_loss(y, yh, MultiResConfig{{kRes}}).value, stft_loss(y, yh, kRes).value);
}

TEST(MultiRes, DefaultEqualsPerResolutionSum) {
  const Vec y = testing::gaussian(2000, 22), yh = testing::gaussian(2000, 23);
  const MultiResConfig cfg = MultiResConfig::standard();
  ASSERT_EQ(cfg.resolutions.size(), 3u);
  double sum = 0;
  for (const auto& r : cfg.resolutions) sum += ref_sc(y, yh, r) + ref_logmag(y, yh, r);
  double lib_sum = 0;
  for (const auto& r : cfg.resolutions) lib_sum += stft_loss(y, yh, r).value;
  const double value = multi_res_stft_loss(y, yh, cfg).value;
  EXPECT_NEAR(value, lib_sum, 1e-12);
  EXPECT_NEAR(value, sum, 1e-9);
  EXPECT_EQ(multi_res_stft_loss(y, y, cfg).value, 0.0);
}

TEST(MultiRes, InvariantUnderResolutionPermutation) {
  const Vec y = testing::gaussian(2000, 24), yh = testing::gaussian(2000, 25);
  MultiResConfig cfg = MultiResConfig::standard();
  const double a = multi_res_stft_loss(y, yh, cfg).value;
  std::reverse(cfg.resolutions.begin(), cfg.resolutions.end());
  EXPECT_NEAR(multi_res_stft_loss(y, yh, cfg).value, a, 1e-12);
  std::rotate(cfg.resolutions.begin(), cfg.resolutions.begin() + 1, cfg.resolutions.end());
  EXPECT_NEAR(multi_res_stft_loss(y, yh, cfg).value, a, 1e-12);
}

TEST(MultiRes, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(2000, 26), yh = testing::gaussian(2000, 27);
  const MultiResConfig cfg = MultiResConfig::standard();
  EXPECT_LT(fd_rel_error([&](const Vec& x, KinkTrace* t) { return multi_res_stft_loss(y, x, cfg, t); },
                         yh, 24, 28),
            1e-3);
}

TEST(MultiRes, EmptyConfigRejected) {
  EXPECT_THROW(multi_res_stft_loss(Vec(800, 1.0), Vec(800, 1.0), MultiResConfig{}), InvalidArgument);
}

// ---- Perceptual distance ----

TEST(Perceptual, EmbeddingIsSeededAndImmutable) {
  EXPECT_EQ(PerceptualEmbedding::from_seed(99), embedding());
  EXPECT_FALSE(PerceptualEmbedding::from_seed(98) == embedding());
  testing::ScratchDir dir("emb");
  embedding().save(dir / "e.bin");
  EXPECT_EQ(PerceptualEmbedding::load(dir / "e.bin"), embedding());
  const PerceptualEmbedding before = embedding();
  perceptual_distance(testing::gaussian(1600, 1), testing::gaussian(1600, 2), embedding());
  EXPECT_EQ(before, embedding());
}

TEST(Perceptual, EqualInputsGiveZeroAndSymmetry) {
  const Vec a = testing::gaussian(1600, 30), b = testing::gaussian(1600, 31);
  EXPECT_EQ(perceptual_distance(a, a, embedding()).value, 0.0);
  EXPECT_EQ(perceptual_distance(a, b, embedding()).value, perceptual_distance(b, a, embedding()).value);
}

TEST(Perceptual, MatchesReferenceEvaluator) {
  const Vec a = testing::gaussian(1600, 32), b = testing::gaussian(1600, 33);
  EXPECT_NEAR(perceptual_distance(a, b, embedding()).value, ref_perceptual(embedding(), a, b), 1e-10);
}

TEST(Perceptual, TriangleInequality) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Vec a = testing::gaussian(1300, 100 + 3 * s), b = testing::gaussian(1300, 101 + 3 * s),
              c = testing::gaussian(1300, 102 + 3 * s);
    const double ac = perceptual_distance(a, c, embedding()).value;
    const double ab = perceptual_distance(a, b, embedding()).value;
    const double bc = perceptual_distance(b, c, embedding()).value;
    EXPECT_LE(ac, ab + bc + 1e-9);
  }
}

TEST(Perceptual, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(1600, 34), yh = testing::gaussian(1600, 35);
  std::size_t checked = 0;
  EXPECT_LT(fd_rel_error([&](const Vec& x, KinkTrace* t) { return perceptual_distance(y, x, embedding(), t); },
                         yh, 40, 36, &checked),
            1e-3);
  EXPECT_GT(checked, 0u);
}

TEST(Perceptual, ShortInputRejected) {
  EXPECT_GT(embedding().receptive_field(), 1024u);
  EXPECT_THROW(perceptual_distance(Vec(1024, 0.1), Vec(1024, 0.2), embedding()), InvalidArgument);
}

// ---- Composite ----

TEST(Composite, EqualInputsGiveZeroForAnyWeights) {
  const Vec y = testing::gaussian(1600, 40);
  for (const LossWeights w : {LossWeights{}, LossWeights{1, 2, 3}, LossWeights{0, 0, 1}}) {
    EXPECT_EQ(composite_loss(y, y, w, MultiResConfig::standard(), embedding()).value, 0.0);
  }
}

TEST(Composite, ProjectionOntoL1) {
  const Vec y = testing::gaussian(1600, 41), yh = testing::gaussian(1600, 42);
  EXPECT_EQ(composite_loss(y, yh, {1, 0, 0}, MultiResConfig::standard(), embedding()).value,
            l1_loss(y, yh).value);
}

TEST(Composite, DefaultWeightsRecompose) {
  const Vec y = testing::gaussian(1600, 43), yh = testing::gaussian(1600, 44);
  const LossWeights w;
  EXPECT_EQ(w.alpha, 0.45);
  EXPECT_EQ(w.beta, 0.45);
  EXPECT_EQ(w.gamma, 0.45);
  const MultiResConfig cfg = MultiResConfig::standard();
  const double expected = 0.45 * l1_loss(y, yh).value + 0.45 * multi_res_stft_loss(y, yh, cfg).value +
                          0.45 * perceptual_distance(y, yh, embedding()).value;
  EXPECT_NEAR(composite_loss(y, yh, w, cfg, embedding()).value, expected, 1e-12);
}

TEST(Composite, LinearInWeights) {
  const Vec y = testing::gaussian(1600, 45), yh = testing::gaussian(1600, 46);
  const MultiResConfig cfg = MultiResConfig::standard();
  const double one = composite_loss(y, yh, {0.3, 0.7, 0.2}, cfg, embedding()).value;
  const double two = composite_loss(y, yh, {0.6, 1.4, 0.4}, cfg, embedding()).value;
  EXPECT_NEAR(two, 2 * one, 1e-12 * std::max(1.0, std::abs(two)));
}

TEST(Composite, GradientMatchesFiniteDifferences) {
  const Vec y = testing::gaussian(1600, 47), yh = testing::gaussian(1600, 48);
  const MultiResConfig cfg = MultiResConfig::standard();
  EXPECT_LT(fd_rel_error([&](const Vec& x, KinkTrace* t) {
              return composite_loss(y, x, LossWeights{}, cfg, embedding(), t);
            },
                         yh, 24, 49),
            1e-3);
}

TEST(Composite, NonNegativeOnRandomPairs) {
  const MultiResConfig cfg = MultiResConfig::standard();
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Vec y = testing::gaussian(1600, 200 + s), yh = testing::gaussian(1600, 300 + s);
    EXPECT_GE(composite_loss(y, yh, LossWeights{}, cfg, embedding()).value, 0.0);
    EXPECT_GE(l1_loss(y, yh).value, 0.0);
    EXPECT_GE(stft_loss(y, yh, kRes).value, 0.0);
  }
}

TEST(Composite, InvalidWeightsRejected) {
  EXPECT_THROW((LossWeights{-1, 0, 0}.validate()), InvalidArgument);
  EXPECT_THROW((LossWeights{NAN, 0, 0}.validate()), InvalidArgument);
}

// ---- Gradient checker ----

TEST(GradCheck, ExactGradientOfSmoothFunctionPasses) {
  auto f = [](std::span<const double> x) { return Evaluation{x[0] * x[0] * x[1] + std::sin(x[1]), 0, {}}; };
  const std::vector<double> x{0.7, -1.3};
  const std::vector<double> g{2 * 0.7 * -1.3, 0.7 * 0.7 + std::cos(-1.3)};
  const GradCheckEntry e = check_gradient("smooth", x, g, f, {0, 1}, {});
  EXPECT_EQ(e.checked, 2u);
  EXPECT_LT(e.rel_error, 1e-8);
  EXPECT_TRUE(e.passed());
  const std::vector<double> wrong{g[0], g[1] * 1.01};
  EXPECT_FALSE(check_gradient("wrong", x, wrong, f, {0, 1}, {}).passed());
}

TEST(GradCheck, SkipsCoordinatesStraddlingASignKink) {
  auto f = [](std::span<const double> x) {
    KinkTrace t;
    t.mix(x[0] > 0.0);
    return Evaluation{std::abs(x[0]) + x[1], t.hash(), {}};
  };
  const GradCheckEntry e = check_gradient("abs", {3e-6, 2.0}, std::vector<double>{1.0, 1.0}, f, {0, 1}, {});
  EXPECT_EQ(e.skipped, 1u);
  EXPECT_EQ(e.checked, 1u);
  EXPECT_TRUE(e.passed());
}

TEST(GradCheck, SkipsCoordinatesNearAModulusKink) {
  // log|c| with c = x0 + i x1: a step of h moves c by more than 2% of |c|
  // only along coordinates when |c| < 50 h.
  auto f = [](std::span<const double> x) {
    KinkTrace t;
    const Complex c(x[0], x[1]);
    t.modulus(c);
    return Evaluation{std::log(std::abs(c)), t.hash(), t.take_moduli()};
  };
  const std::vector<double> near{1e-4, 1e-4};
  const double r2 = 2e-8;
  const GradCheckEntry e = check_gradient("near", near, std::vector<double>{1e-4 / r2, 1e-4 / r2}, f, {0, 1}, {});
  EXPECT_EQ(e.skipped, 2u);
  EXPECT_FALSE(e.passed());
  const std::vector<double> far{0.3, -0.4};
  const GradCheckEntry ok = check_gradient("far", far, std::vector<double>{0.3 / 0.25, -0.4 / 0.25}, f, {0, 1}, {});
  EXPECT_EQ(ok.checked, 2u);
  EXPECT_TRUE(ok.passed());
}

TEST(GradCheck, SuiteCoversEveryLossAndLayerAndPasses) {
  const std::vector<GradCheckEntry> entries = run_gradcheck_suite(3);
  std::vector<std::string> names;
  for (const auto& e : entries) {
    names.push_back(e.name);
    EXPECT_TRUE(e.passed()) << e.name << " " << e.rel_error;
  }
  for (const std::string n : {"loss/l1", "loss/spectral_convergence", "loss/log_stft_magnitude", "loss/stft",
                              "loss/multi_res_stft", "loss/perceptual", "loss/composite", "denoiser/encoder.0",
                              "denoiser/encoder.1", "denoiser/bottleneck.0", "denoiser/decoder.0",
                              "denoiser/decoder.1"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

}  // namespace
}  // namespace pdw
