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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "pdw/attack.hpp"
#include "pdw/corpus.hpp"
#include "pdw/embedding.hpp"
#include "pdw/evaluate.hpp"
#include "pdw/fft.hpp"
#include "pdw/gradcheck.hpp"
#include "pdw/losses.hpp"
#include "pdw/noise.hpp"
#include "pdw/pipeline.hpp"
#include "pdw/rng.hpp"
#include "pdw/stft.hpp"
#include "pdw/training.hpp"
#include "pdw/transcriber.hpp"
#include "pdw/wav.hpp"
#include "pdw/wer.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace pdw;
using Clock = std::chrono::steady_clock;

namespace {

// Desk-scale fine-tuning schedule shared by the defense checks.
constexpr std::size_t kUtterances = 64;
constexpr std::size_t kPretrainEpochs = 0;
constexpr std::size_t kEpochs = 30;
constexpr double kPretrainLr = 1e-3;
constexpr double kLr = 1e-3;
constexpr std::size_t kSegment = 8192;
constexpr std::uint64_t kEvalSeed = 101, kTrainSeed = 102, kAugmentSeed = 103, kModelSeed = 104,
                        kShuffleSeed = 105, kEmbeddingSeed = 106;
const std::vector<double> kSweep{10, 15, 20, 25, 30};

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs one criterion, prints its verdict line, and reports whether it passed.
bool report(int number, const std::string& title, double budget_s, const std::function<Outcome()>& body,
            bool warn_only = false) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = seconds_since(t0);
  if (budget_s > 0 && elapsed > budget_s) {
    o.passed = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(budget_s)) + " s budget";
  }
  const char* verdict = o.passed ? "PASS" : warn_only ? "WARN" : "FAIL";
  std::printf("criterion %d %s: %s (%.1f s) %s\n", number, verdict, title.c_str(), elapsed, o.detail.c_str());
  std::fflush(stdout);
  return o.passed || warn_only;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- 1 ----

Outcome gradients() {
  const std::vector<GradCheckEntry> entries = run_gradcheck_suite(1);
  double worst = 0.0;
  std::string worst_name;
  std::size_t failed = 0;
  bool saw_loss = false, saw_layer = false;
  for (const auto& e : entries) {
    if (e.rel_error > worst) worst = e.rel_error, worst_name = e.name;
    if (!e.passed() || e.checked == 0) ++failed;
    saw_loss |= e.name.rfind("loss/", 0) == 0;
    saw_layer |= e.name.rfind("denoiser/", 0) == 0;
  }
  return {failed == 0 && saw_loss && saw_layer && !entries.empty(),
          std::to_string(entries.size()) + " tensors, " + std::to_string(failed) + " failed, worst " +
              fmt("%.2e", worst) + " at " + worst_name};
}

// ---- 2 ----

std::vector<testing::Cplx> bins_of(const AudioBuffer& x) {
  const ComplexSpectrum s = dft(x);
  return {s.bins.begin(), s.bins.end()};
}

Outcome attack_correctness() {
  std::vector<AudioBuffer> signals;
  Rng lengths(7);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 8 + lengths.below(4000);
    signals.emplace_back(s % 2 ? testing::gaussian(n, 500 + s) : testing::uniform(n, 500 + s, -1.0, 1.0));
  }
  for (std::size_t i = 0; i < 20; ++i) signals.push_back(synthesize_utterance(17, utterance_id(i)).audio);

  std::size_t checks = 0, snr_bad = 0, oracle_bad = 0, superset_bad = 0;
  double slack = INFINITY;
  for (const auto& x : signals) {
    const auto bins = bins_of(x);
    std::set<std::size_t> previous;
    bool first = true;
    // Descending targets: each stronger attack must remove a superset.
    for (auto it = kSweep.rbegin(); it != kSweep.rend(); ++it) {
      const double target = *it;
      const AttackResult r = kenansville_attack(x, {target});
      ++checks;
      const double measured = snr_db(x, r.adversarial).db();
      slack = std::min(slack, std::min(r.achieved_snr.db(), measured) - target);
      if (r.achieved_snr.db() < target || measured < target - 1e-9) ++snr_bad;
      if (r.plan.removed_bins != testing::greedy_removal(bins, target)) ++oracle_bad;
      const std::set<std::size_t> now(r.plan.removed_bins.begin(), r.plan.removed_bins.end());
      if (!first && !std::includes(now.begin(), now.end(), previous.begin(), previous.end())) ++superset_bad;
      previous = now;
      first = false;
    }
  }
  return {snr_bad + oracle_bad + superset_bad == 0,
          std::to_string(checks) + " attacks, snr misses " + std::to_string(snr_bad) + ", oracle mismatches " +
              std::to_string(oracle_bad) + ", superset violations " + std::to_string(superset_bad) +
              fmt(", min slack %.3g dB", slack)};
}

// ---- 3 ----

std::size_t enumerate_frames(std::size_t len, const StftResolution& r) {
  const std::size_t padded = len + 2 * (r.window_len / 2);
  std::size_t n = 0;
  for (std::size_t start = 0; start + r.window_len <= padded; start += r.hop) ++n;
  return n;
}

Outcome transforms() {
  double round_trip = 0.0, parseval = 0.0;
  std::size_t sizes = 0;
  for (std::size_t n = 1; n <= 4100; n = n < 64 ? n + 1 : n * 3 / 2 + 1) {
    for (std::size_t m : {n, std::size_t{1} << static_cast<int>(std::log2(static_cast<double>(n)))}) {
      const std::vector<double> x = testing::gaussian(m, 900 + m);
      const ComplexSpectrum X = dft(x);
      const std::vector<double> back = idft_real(X);
      double peak = 0.0, err = 0.0, spec = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        peak = std::max(peak, std::abs(x[i]));
        err = std::max(err, std::abs(back[i] - x[i]));
      }
      for (const auto& c : X.bins) spec += std::norm(c);
      const double energy = testing::sum_sq(x);
      round_trip = std::max(round_trip, err / peak);
      parseval = std::max(parseval, std::abs(spec / static_cast<double>(m) - energy) / energy);
      ++sizes;
    }
  }
  std::size_t frame_bad = 0, frame_checks = 0;
  const std::vector<StftResolution> resolutions{{512, 50, 240}, {1024, 120, 600}, {2048, 240, 1200}, {16, 3, 7}};
  for (const auto& r : resolutions) {
    for (std::size_t len = r.window_len; len <= 4000; ++len) {
      ++frame_checks;
      if (stft_frame_count(len, r) != enumerate_frames(len, r)) ++frame_bad;
    }
    for (std::size_t len : {r.window_len, r.window_len + 1, std::size_t{3001}}) {
      ++frame_checks;
      if (stft(testing::gaussian(len, len), r).frames != enumerate_frames(len, r)) ++frame_bad;
    }
  }
  double mix_err = 0.0;
  for (int target = 0; target <= 60; ++target) {
    const AudioBuffer clean(testing::gaussian(4000, 40 + target, 0.3));
    const AudioBuffer noise = generate_noise(target % 2 ? NoiseType::kPink : NoiseType::kWhite, 4000, target);
    mix_err = std::max(mix_err, std::abs(snr_db(clean, mix_at_snr(clean, noise, SnrDb::finite(target))).db() - target));
  }
  return {round_trip <= 1e-9 && parseval <= 1e-10 && frame_bad == 0 && mix_err <= 0.01,
          std::to_string(sizes) + fmt(" sizes, round trip %.2e, Parseval %.2e", round_trip, parseval) + ", " +
              std::to_string(frame_bad) + "/" + std::to_string(frame_checks) + " frame counts wrong" +
              fmt(", mix error %.2e dB", mix_err)};
}

// ---- 4 ----

Outcome wer_oracle() {
  Rng rng(4242);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref(1 + rng.below(15)), hyp(rng.below(16));
    const std::uint64_t vocab = 2 + rng.below(10);
    for (auto& w : ref) w = "w" + std::to_string(rng.below(vocab));
    for (auto& w : hyp) w = "w" + std::to_string(rng.below(vocab));
    const auto oracle = testing::full_matrix_edit(ref, hyp);
    const WerResult r = wer(ref, hyp);
    if (r.errors() != oracle.distance || r.substitutions != oracle.substitutions ||
        r.deletions != oracle.deletions || r.insertions != oracle.insertions) {
      ++bad;
    }
  }
  return {bad == 0, std::to_string(bad) + " of 1000 pairs differ"};
}

// ---- 5, 6 ----

struct DefenseRun {
  fs::path root;
  Manifest eval;
  std::vector<TrainingPair> train;
  PerceptualEmbedding embedding = PerceptualEmbedding::from_seed(kEmbeddingSeed);
  FineTuneConfig config;
  Checkpoint pretrained;
  double pretrain_s = 0.0;
};

FineTuneConfig desk_schedule(double gamma) {
  FineTuneConfig c;
  c.epochs = kEpochs;
  c.phase1_epochs = kPretrainEpochs;
  c.phase1_learning_rate = kPretrainLr;
  c.learning_rate = kLr;
  c.segment_length = kSegment;
  c.seed = kShuffleSeed;
  c.step.weights.gamma = gamma;
  return c;
}

std::vector<TrainingPair> noisy_pairs(std::uint64_t corpus_seed, std::size_t n) {
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const SyntheticUtterance u = synthesize_utterance(corpus_seed, utterance_id(i));
    const AugmentChoice c = augment_choice(kAugmentSeed, u.id);
    const AudioBuffer noise = generate_noise(c.noise, u.audio.size(), c.noise_seed);
    pairs.push_back({u.id, mix_at_snr(u.audio, noise, SnrDb::finite(c.snr_db)), u.audio});
  }
  return pairs;
}

Checkpoint train(const DefenseRun& run, double gamma) {
  return fine_tune(run.pretrained, run.train, desk_schedule(gamma), run.embedding);
}

Defense denoiser_defense(const std::string& name, const Checkpoint& ckpt) {
  Defense d;
  d.name = name;
  d.stages.push_back(std::make_shared<DenoiserStage>(ckpt.model));
  return d;
}

std::vector<Condition> sweep_conditions(bool benign) {
  std::vector<Condition> c;
  if (benign) c.push_back(Condition::benign());
  for (double s : kSweep) c.push_back(Condition::attack(s));
  return c;
}

struct Shared {
  DefenseRun run;
  Checkpoint full;  // (0.45, 0.45, 0.45)
  Checkpoint no_perceptual;
  EvalReport report;
};

Outcome defense_direction(Shared& s) {
  DefenseRun& run = s.run;
  run.eval = generate_synthetic_corpus(kUtterances, kEvalSeed, run.root / "eval", 1);
  run.train = noisy_pairs(kTrainSeed, kUtterances);
  run.pretrained = initial_checkpoint(kModelSeed, DenoiserArch::standard(), desk_schedule(0.45));
  s.full = train(run, 0.45);
  const RuleBasedTranscriber rule;
  s.report = evaluate(run.eval, rule, {parse_defense("none"), denoiser_defense("full", s.full)},
                      sweep_conditions(true));
  const double undefended = s.report.find("none", "20")->wer_pct();
  const double defended = s.report.find("full", "20")->wer_pct();
  const double benign_none = s.report.find("none", "benign")->wer_pct();
  const double benign_def = s.report.find("full", "benign")->wer_pct();
  const double rel = undefended > 0 ? (undefended - defended) / undefended : 0.0;
  return {rel >= 0.10 && benign_def - benign_none <= 2.0,
          fmt("20 dB WER %.2f%% -> %.2f%% (%.1f%% relative), ", undefended, defended, 100 * rel) +
              fmt("benign %.2f%% -> %.2f%%", benign_none, benign_def)};
}

Outcome perceptual_effect(Shared& s) {
  DefenseRun& run = s.run;
  s.no_perceptual = train(run, 0.0);
  const RuleBasedTranscriber rule;
  const EvalReport b = evaluate(run.eval, rule, {denoiser_defense("noperc", s.no_perceptual)}, sweep_conditions(false));
  StepConfig composite;  // default weights (0.45, 0.45, 0.45)
  std::vector<AudioBuffer> clean;
  for (const auto& u : run.eval.entries) clean.push_back(load_wav(run.eval.resolve(u)));
  int wins = 0;
  std::string detail;
  for (double snr : kSweep) {
    std::vector<TrainingPair> val;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      val.push_back({run.eval.entries[i].id, kenansville_attack(clean[i], {snr}).adversarial, clean[i]});
    }
    const double loss_full = evaluate_loss(s.full.model, val, composite, run.embedding);
    const double loss_none = evaluate_loss(s.no_perceptual.model, val, composite, run.embedding);
    const std::string label = Condition::attack(snr).label();
    const double wer_full = s.report.find("full", label)->wer_pct();
    const double wer_none = b.find("noperc", label)->wer_pct();
    const bool win = loss_full <= loss_none && wer_full <= wer_none;
    wins += win;
    detail += fmt("[%g dB loss %.4f/%.4f", snr, loss_full, loss_none) + fmt(" WER %.2f/%.2f", wer_full, wer_none) +
              (win ? " ok] " : " worse] ");
  }
  return {wins >= 3, std::to_string(wins) + "/5 no worse " + detail};
}

// Mean snr_db(clean, denoised(noisy)) - snr_db(clean, noisy) on held-out noisy speech.
std::string snr_improvement(const Shared& s) {
  const std::vector<TrainingPair> held_out = noisy_pairs(kEvalSeed + 1000, 32);
  double before = 0.0, after = 0.0;
  for (const auto& p : held_out) {
    before += snr_db(p.clean, p.noisy).db();
    after += snr_db(p.clean, forward(s.full.model, p.noisy)).db();
  }
  const double n = static_cast<double>(held_out.size());
  const double gain = (after - before) / n;
  return fmt("denoiser SNR %.2f dB -> %.2f dB (%+.2f dB, invariant asks >= 3 dB): ", before / n, after / n, gain) +
         (gain >= 3.0 ? "met" : "not met");
}

// ---- 7 ----

Outcome determinism(const fs::path& scratch) {
  RunConfig c;
  c.seed = 77;
  c.corpus_size = 6;
  c.train_size = 8;
  c.epochs = 2;
  c.phase1_epochs = 1;
  c.learning_rate = 1e-3;
  c.segment_length = 4096;
  c.jobs = 2;
  c.output_dir = (scratch / "run").string();
  std::map<std::string, std::string> first;
  std::size_t wavs = 0, ckpts = 0, reports = 0, differing = 0, total = 0;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(c.output_dir);
    run_pipeline(c);
    for (const auto& e : fs::recursive_directory_iterator(c.output_dir)) {
      if (!e.is_regular_file()) continue;
      const std::string name = fs::relative(e.path(), c.output_dir).string();
      std::string bytes = testing::read_file(e.path());
      if (pass == 0) {
        first[name] = std::move(bytes);
        const std::string ext = e.path().extension().string();
        wavs += ext == ".wav";
        ckpts += ext == ".ckpt";
        reports += name.rfind("eval/", 0) == 0;
      } else {
        ++total;
        const auto it = first.find(name);
        if (it == first.end() || it->second != bytes) ++differing;
      }
    }
  }
  const bool same_set = total == first.size();
  return {same_set && differing == 0 && wavs > 0 && ckpts > 0 && reports > 0,
          std::to_string(first.size()) + " files (" + std::to_string(wavs) + " wav, " + std::to_string(ckpts) +
              " checkpoints, " + std::to_string(reports) + " report files), " + std::to_string(differing) +
              " differ between the two runs"};
}

// ---- 8 ----

Outcome metric_axioms() {
  const PerceptualEmbedding emb = PerceptualEmbedding::from_seed(8);
  Rng rng(88);
  std::size_t identity_bad = 0, symmetry_bad = 0, triangle_bad = 0;
  double worst_violation = -INFINITY;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const std::size_t n = 1200 + rng.below(800);
    const std::vector<double> a = testing::gaussian(n, 3 * t + 1);
    std::vector<double> b = testing::gaussian(n, 3 * t + 2), c = testing::gaussian(n, 3 * t + 3);
    // Every third triple keeps b and c close to a.
    if (t % 3 == 0) {
      for (std::size_t i = 0; i < n; ++i) {
        b[i] = a[i] + 1e-3 * b[i];
        c[i] = a[i] + 1e-3 * c[i];
      }
    }
    const double ab = perceptual_distance(a, b, emb).value, ba = perceptual_distance(b, a, emb).value;
    const double bc = perceptual_distance(b, c, emb).value, ac = perceptual_distance(a, c, emb).value;
    if (perceptual_distance(a, a, emb).value != 0.0 || !(ab > 0.0)) ++identity_bad;
    if (std::abs(ab - ba) > 1e-9) ++symmetry_bad;
    worst_violation = std::max(worst_violation, ac - (ab + bc));
    if (ac > ab + bc + 1e-9) ++triangle_bad;
  }
  return {identity_bad + symmetry_bad + triangle_bad == 0,
          "200 triples: identity " + std::to_string(identity_bad) + ", symmetry " + std::to_string(symmetry_bad) +
              ", triangle " + std::to_string(triangle_bad) + fmt(" failures, max d(a,c)-d(a,b)-d(b,c) %.3e", worst_violation)};
}

}  // namespace

int main() {
  const testing::ScratchDir scratch("acceptance");
  bool ok = true;
  ok &= report(1, "gradient suite", 120, gradients);
  ok &= report(2, "attack correctness", 60, attack_correctness);
  ok &= report(3, "transform suite", 30, transforms);
  ok &= report(4, "WER oracle equivalence", 10, wer_oracle);
  Shared shared;
  shared.run.root = scratch.path();
  ok &= report(5, "defense direction", 900, [&] { return defense_direction(shared); });
  report(6, "perceptual-loss effect", 0, [&] { return perceptual_effect(shared); }, true);
  if (!shared.full.model.params().empty()) std::printf("info: %s\n", snr_improvement(shared).c_str());
  ok &= report(7, "determinism", 0, [&] { return determinism(scratch.path()); });
  ok &= report(8, "metric axioms", 0, metric_axioms);
  std::printf("acceptance: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
