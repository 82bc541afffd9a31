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

#include <cmath>
#include <map>
#include <set>

#include "pdw/corpus.hpp"
#include "pdw/error.hpp"
#include "pdw/manifest.hpp"
#include "pdw/rng.hpp"
#include "pdw/wav.hpp"
#include "support/oracles.hpp"

namespace pdw {
namespace {

using testing::ScratchDir;

// Autocorrelation pitch estimate: smallest lag whose normalized
// autocorrelation reaches 90% of the best lag in the 80..300 Hz range,
// refined by parabolic interpolation.
double autocorrelation_pitch(const std::vector<double>& x) {
  const std::size_t lo = 16000 / 300, hi = 16000 / 80;
  std::vector<double> r(hi + 2, 0.0);
  for (std::size_t lag = lo - 1; lag <= hi + 1; ++lag) {
    double s = 0, e0 = 0, e1 = 0;
    for (std::size_t n = 0; n + lag < x.size(); ++n) {
      s += x[n] * x[n + lag];
      e0 += x[n] * x[n];
      e1 += x[n + lag] * x[n + lag];
    }
    r[lag] = s / std::sqrt(e0 * e1);
  }
  double best = -1;
  for (std::size_t lag = lo; lag <= hi; ++lag) best = std::max(best, r[lag]);
  std::size_t pick = lo;
  for (std::size_t lag = lo; lag <= hi; ++lag) {
    if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      pick = lag;
      break;
    }
  }
  const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
  const double denom = a - 2 * b + c;
  const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
  return 16000.0 / (static_cast<double>(pick) + shift);
}

TEST(Codebook, SixteenDistinctLabelsOverTheStatedRange) {
  const auto& cb = codebook();
  std::set<std::string> labels;
  for (const auto& e : cb) {
    labels.insert(e.label);
    EXPECT_GE(e.f0_hz, 90.0);
    EXPECT_LE(e.f0_hz, 250.0);
  }
  EXPECT_EQ(labels.size(), 16u);
  EXPECT_DOUBLE_EQ(cb.front().f0_hz, 90.0);
  EXPECT_DOUBLE_EQ(cb.back().f0_hz, 250.0);
  EXPECT_EQ(codebook_index(cb[5].label), 5);
  EXPECT_EQ(codebook_index("nope"), -1);
}

TEST(Synthesis, EmptyCorpus) {
  ScratchDir dir("corpus");
  const Manifest m = generate_synthetic_corpus(0, 1, dir / "c");
  EXPECT_TRUE(m.empty());
  EXPECT_TRUE(read_manifest(dir / "c" / "manifest.tsv").empty());
}

TEST(Synthesis, SameSeedGivesByteIdenticalFiles) {
  ScratchDir dir("corpus");
  const Manifest a = generate_synthetic_corpus(6, 9, dir / "a");
  const Manifest b = generate_synthetic_corpus(6, 9, dir / "b", 3);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(testing::read_file(a.resolve(a.entries[i])), testing::read_file(b.resolve(b.entries[i])));
  }
  EXPECT_EQ(testing::read_file(dir / "a" / "manifest.tsv"), testing::read_file(dir / "b" / "manifest.tsv"));
  const Manifest c = generate_synthetic_corpus(6, 10, dir / "c");
  EXPECT_NE(testing::read_file(a.resolve(a.entries[0])), testing::read_file(c.resolve(c.entries[0])));
}

TEST(Synthesis, UtterancesFollowTheTimingRules) {
  const CorpusTiming timing;
  for (std::size_t i = 0; i < 40; ++i) {
    const SyntheticUtterance u = synthesize_utterance(11, utterance_id(i));
    EXPECT_GE(u.audio.duration_seconds(), timing.min_total_seconds);
    EXPECT_LE(u.audio.duration_seconds(), timing.max_total_seconds);
    ASSERT_EQ(u.word_spans.size(), u.transcript.size());
    EXPECT_GE(u.transcript.size(), timing.min_words);
    EXPECT_LE(u.transcript.size(), timing.max_words);
    for (const auto& w : u.transcript) EXPECT_GE(codebook_index(w), 0) << w;
    for (const auto& [b, e] : u.word_spans) {
      EXPECT_GE(static_cast<double>(e - b) / 16000.0, timing.min_word_seconds - 1e-9);
      EXPECT_LE(static_cast<double>(e - b) / 16000.0, timing.max_word_seconds + 1e-9);
    }
    // Gaps between words are silent.
    std::size_t prev_end = 0;
    for (const auto& [b, e] : u.word_spans) {
      for (std::size_t t = prev_end; t < b; ++t) ASSERT_EQ(u.audio.samples[t], 0.0);
      prev_end = e;
    }
    for (double v : u.audio.samples) EXPECT_LE(std::abs(v), 1.0);
  }
  EXPECT_EQ(utterance_id(7), "utt0007");
}

TEST(Synthesis, WordPitchMatchesCodebook) {
  for (std::size_t i = 0; i < 12; ++i) {
    const SyntheticUtterance u = synthesize_utterance(12, utterance_id(i));
    for (std::size_t w = 0; w < u.transcript.size(); ++w) {
      const auto [b, e] = u.word_spans[w];
      const std::vector<double> word(u.audio.samples.begin() + static_cast<long>(b),
                                     u.audio.samples.begin() + static_cast<long>(e));
      const double f0 = codebook()[static_cast<std::size_t>(codebook_index(u.transcript[w]))].f0_hz;
      EXPECT_NEAR(autocorrelation_pitch(word), f0, 5.0) << u.id << " word " << w;
    }
  }
}

TEST(Synthesis, EveryCodebookEntryPitchIsRecoverable) {
  const std::vector<double> phases{0.3, 1.1, 2.0, 4.5};
  for (const auto& e : codebook()) {
    const std::vector<double> w = synthesize_word(e, 3200, 0.4, phases, 240);
    EXPECT_NEAR(autocorrelation_pitch(w), e.f0_hz, 5.0) << e.label;
    double peak = 0;
    for (double v : w) peak = std::max(peak, std::abs(v));
    EXPECT_LE(peak, 0.4 + 1e-12);
    EXPECT_EQ(w.front(), 0.0);
  }
}

TEST(Augment, MeasuredSnrMatchesRecord) {
  ScratchDir dir("aug");
  const Manifest clean = generate_synthetic_corpus(10, 20, dir / "clean", 2);
  const AugmentResult r = augment_with_noise(clean, 21, dir / "noisy", 2);
  ASSERT_EQ(r.manifest.size(), 10u);
  EXPECT_TRUE(r.failures.empty());
  for (const auto& u : r.manifest.entries) {
    ASSERT_TRUE(u.snr_db.has_value());
    EXPECT_EQ(u.source_id, u.id);
    const AugmentChoice c = augment_choice(21, u.id);
    EXPECT_EQ(u.noise_type, to_string(c.noise));
    EXPECT_EQ(u.snr_db->db(), c.snr_db);
    const AudioBuffer a = load_wav(clean.resolve(*clean.find(u.source_id)));
    const AudioBuffer b = load_wav(r.manifest.resolve(u));
    EXPECT_NEAR(snr_db(a, b).db(), u.snr_db->db(), 0.01) << u.id;
    EXPECT_EQ(u.transcript, clean.find(u.id)->transcript);
  }
  EXPECT_EQ(read_manifest(dir / "noisy" / "manifest.tsv").entries, r.manifest.entries);
}

TEST(Augment, ChoicesAreRoughlyUniform) {
  std::map<std::pair<NoiseType, double>, int> counts;
  for (std::size_t i = 0; i < 500; ++i) {
    const AugmentChoice c = augment_choice(22, utterance_id(i));
    ++counts[{c.noise, c.snr_db}];
  }
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [cell, n] : counts) {
    EXPECT_GE(n, 30) << to_string(cell.first) << " " << cell.second;
    EXPECT_LE(n, 70) << to_string(cell.first) << " " << cell.second;
  }
}

TEST(Augment, ChoicesAreSeeded) {
  for (std::size_t i = 0; i < 20; ++i) {
    const AugmentChoice a = augment_choice(23, utterance_id(i));
    const AugmentChoice b = augment_choice(23, utterance_id(i));
    EXPECT_EQ(a.noise, b.noise);
    EXPECT_EQ(a.snr_db, b.snr_db);
    EXPECT_EQ(a.noise_seed, b.noise_seed);
  }
}

TEST(Augment, MissingSourceFileIsReportedNotFatal) {
  ScratchDir dir("aug");
  Manifest m = generate_synthetic_corpus(2, 24, dir / "clean");
  m.entries.push_back(Utterance{"ghost", "ghost.wav", {"ka"}, {}, {}, {}});
  const AugmentResult r = augment_with_noise(m, 25, dir / "noisy");
  EXPECT_EQ(r.manifest.size(), 2u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].id, "ghost");
}

Manifest ten_records() {
  Manifest m;
  for (int i = 0; i < 10; ++i) {
    Utterance u;
    u.id = "rec" + std::to_string(i);
    u.path = i % 3 == 0 ? "dir with spaces/file " + std::to_string(i) + ".wav" : "f" + std::to_string(i) + ".wav";
    u.transcript = {"ka", i % 2 ? "lu" : "mi", "so"};
    if (i % 2 == 0) {
      u.snr_db = i == 4 ? SnrDb::infinite() : SnrDb::finite(18.5 + i);
      u.noise_type = i == 4 ? "kenansville" : "pink";
      u.source_id = "src" + std::to_string(i);
    }
    m.entries.push_back(u);
  }
  return m;
}

TEST(Manifest, WriteReadIdentity) {
  ScratchDir dir("man");
  const Manifest m = ten_records();
  write_manifest(m, dir / "m.tsv");
  const Manifest back = read_manifest(dir / "m.tsv");
  EXPECT_EQ(back.entries, m.entries);
  EXPECT_EQ(back.base_dir, dir.path());
  EXPECT_EQ(parse_manifest(format_manifest(m)).entries, m.entries);
  EXPECT_EQ(back.resolve(back.entries[0]), dir.path() / "dir with spaces/file 0.wav");
}

TEST(Manifest, MissingTranscriptNamesTheLine) {
  std::string text = "# header comment\n";
  for (int i = 0; i < 5; ++i) text += "u" + std::to_string(i) + "\tu.wav\tka lu\n";
  text += "broken\tb.wav\n";
  try {
    parse_manifest(text, "m.tsv");
    FAIL() << "expected an error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("m.tsv:7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("transcript"), std::string::npos) << e.what();
  }
}

TEST(Manifest, DuplicateIdsAndBadSnrRejected) {
  EXPECT_THROW(parse_manifest("a\tx.wav\tka\na\ty.wav\tlu\n"), FormatError);
  EXPECT_THROW(parse_manifest("a\tx.wav\tka\tloud\n"), FormatError);
  EXPECT_THROW(read_manifest("/nonexistent/manifest.tsv"), IoError);
}

TEST(Manifest, DurationComesFromTheAudio) {
  ScratchDir dir("man");
  const Manifest m = generate_synthetic_corpus(2, 30, dir / "c");
  const SyntheticUtterance u = synthesize_utterance(30, m.entries[1].id);
  EXPECT_DOUBLE_EQ(utterance_duration(m, m.entries[1]), u.audio.duration_seconds());
}

TEST(Rng, PortableDrawsAreStable) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.below(7), 7u);
    b.below(7);
  }
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(2, std::uint64_t{0}));
}

}  // namespace
}  // namespace pdw
