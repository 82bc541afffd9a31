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
#include <optional>
#include <string>
#include <vector>

#include "pdw/audio.hpp"

namespace pdw {

struct Utterance {
  std::string id;
  std::filesystem::path path;  // relative paths resolve against the manifest directory
  std::vector<std::string> transcript;
  // Optional per-record metadata (augmentation or attack provenance).
  std::optional<SnrDb> snr_db;
  std::string noise_type;
  std::string source_id;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Manifest {
  std::vector<Utterance> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const Utterance& u) const;
  const Utterance* find(const std::string& id) const;
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

// One record per line, tab-separated:
//   id <TAB> path <TAB> transcript [<TAB> snr_db <TAB> noise_type <TAB> source_id]
// Blank lines and lines starting with '#' are skipped. Errors name the line.
Manifest parse_manifest(const std::string& text, const std::string& origin = "manifest");
std::string format_manifest(const Manifest& manifest);

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

// Duration in seconds, read from the WAV header/data.
double utterance_duration(const Manifest& manifest, const Utterance& u);

std::string join_words(const std::vector<std::string>& words);

}  // namespace pdw
