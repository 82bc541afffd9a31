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
#include <filesystem>
#include <string>
#include <vector>

#include "pdw/losses.hpp"

namespace pdw {

// Declarative description of a full pipeline run. Field names in errors
// and in the file format are "<section>.<key>".
struct RunConfig {
  // [run]
  std::uint64_t seed = 7;
  std::string output_dir = "pdw-run";
  int jobs = 1;
  // [corpus]
  std::size_t corpus_size = 64;
  std::size_t train_size = 64;  // separate noise-augmented training corpus
  // [attack]
  std::vector<double> attack_snrs{10, 15, 20, 25, 30};
  // [loss]
  LossWeights weights;
  MultiResConfig resolutions = MultiResConfig::standard();
  // [train]
  std::size_t epochs = 10;
  std::size_t batch_size = 4;
  double learning_rate = 3e-5;
  std::size_t phase1_epochs = 0;
  double phase1_learning_rate = 1e-3;
  std::size_t segment_length = 0;
  double clip_norm = 5.0;
  // [eval]
  std::string transcriber = "rule";
  bool benign = true;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Line-oriented "key = value" with "[section]" headers; '#' starts a
// comment line. Unknown sections or keys are errors.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);
// Writes every field; parse_run_config(serialize_run_config(c)) == c.
std::string serialize_run_config(const RunConfig& config);

// Applies one "section.key=value" override (as from a command-line flag).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

std::string format_resolutions(const MultiResConfig& config);
MultiResConfig parse_resolutions(const std::string& text);
std::vector<double> parse_snr_list(const std::string& text);
std::string format_snr_list(const std::vector<double>& snrs);

}  // namespace pdw
