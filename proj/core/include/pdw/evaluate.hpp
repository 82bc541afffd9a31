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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdw/audio.hpp"
#include "pdw/denoiser.hpp"
#include "pdw/manifest.hpp"
#include "pdw/spectral_subtraction.hpp"
#include "pdw/transcriber.hpp"

namespace pdw {

// One pre-processing stage applied before transcription.
class DefenseStage {
 public:
  virtual ~DefenseStage() = default;
  virtual AudioBuffer apply(const AudioBuffer& audio) const = 0;
};

class DenoiserStage : public DefenseStage {
 public:
  explicit DenoiserStage(DenoiserModel model) : model_(std::move(model)) {}
  AudioBuffer apply(const AudioBuffer& audio) const override { return forward(model_, audio); }

 private:
  DenoiserModel model_;
};

class SpectralSubtractionStage : public DefenseStage {
 public:
  explicit SpectralSubtractionStage(SpectralSubtractionParams params) : params_(params) {}
  AudioBuffer apply(const AudioBuffer& audio) const override {
    return spectral_subtraction_denoise(audio, params_);
  }

 private:
  SpectralSubtractionParams params_;
};

// Named ordered chain; an empty chain is the undefended pipeline.
struct Defense {
  std::string name;
  std::vector<std::shared_ptr<const DefenseStage>> stages;

  AudioBuffer apply(const AudioBuffer& audio) const;
};

// "[label=]stage[+stage...]" with stages "none", "denoiser:<checkpoint>",
// "specsub" or "specsub:<noise frames>". Without a label the spec itself
// names the defense. Throws ConfigError("defense").
Defense parse_defense(const std::string& spec);

// Attack condition: benign (no attack) or a Kenansville target SNR.
struct Condition {
  std::optional<double> snr_db;

  static Condition benign() { return {}; }
  static Condition attack(double db) { return {db}; }
  // "benign" or the SNR in shortest decimal form, e.g. "20".
  std::string label() const;
  static Condition parse(const std::string& label);
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct ReportRow {
  std::string defense;
  std::string condition;
  std::size_t utterances = 0;  // successfully scored
  std::size_t reference_words = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t failures = 0;  // utterances that raised; excluded from the totals

  // Pooled (S + D + I) / reference words, in percent. 0 when no words.
  double wer_pct() const;
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct UtteranceRecord {
  std::string defense;
  std::string condition;
  std::string id;
  std::optional<SnrDb> achieved_snr;  // attacked conditions only
  std::vector<std::string> reference;
  std::vector<std::string> hypothesis;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::string error;  // non-empty when the utterance failed

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct EvalReport {
  std::vector<ReportRow> rows;               // defense-major, conditions in request order
  std::vector<UtteranceRecord> utterances;   // same order, then manifest order

  const ReportRow* find(const std::string& defense, const std::string& condition) const;
};

// For every condition, attack each clean utterance (or pass it through),
// run every defense chain, transcribe and score against the manifest
// transcript. Utterances run in parallel; rows are reduced in a fixed order.
EvalReport evaluate(const Manifest& manifest, const Transcriber& transcriber,
                    const std::vector<Defense>& defenses, const std::vector<Condition>& conditions,
                    int jobs = 1);

// 100 * (base - target) / base per condition present in both; nullopt
// where the baseline WER is zero.
std::map<std::string, std::optional<double>> relative_improvement(const EvalReport& report,
                                                                  const std::string& baseline,
                                                                  const std::string& target);
std::optional<double> relative_improvement(double base_wer, double target_wer);

// CSV: defense,condition,wer_pct,utterances,ref_words,substitutions,deletions,insertions,failures
std::string format_report_csv(const EvalReport& report);
std::vector<ReportRow> parse_report_csv(const std::string& text, const std::string& origin = "report");
// One JSON object per line.
std::string format_utterance_log(const std::vector<UtteranceRecord>& records);
std::vector<UtteranceRecord> parse_utterance_log(const std::string& text,
                                                 const std::string& origin = "log");
// Defense x condition pivot of WER %, tab-separated.
std::string format_wer_table(const std::vector<ReportRow>& rows);
// Per condition relative improvement of every defense over `baseline`;
// absent values are written as "NA".
std::string format_improvement_table(const std::vector<ReportRow>& rows, const std::string& baseline);

// Writes report.csv, utterances.jsonl and wer_table.tsv under dir.
void write_report(const EvalReport& report, const std::filesystem::path& dir);
EvalReport read_report(const std::filesystem::path& dir);

}  // namespace pdw
