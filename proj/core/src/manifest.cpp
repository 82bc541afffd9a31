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

#include "pdw/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pdw/error.hpp"
#include "pdw/format.hpp"
#include "pdw/wav.hpp"

namespace pdw {
namespace {

void check_field(const std::string& value, const char* name) {
  if (value.find_first_of("\t\n\r") != std::string::npos) {
    throw InvalidArgument(std::string("manifest field '") + name +
                          "' contains a tab or newline: " + value);
  }
}

}  // namespace

std::filesystem::path Manifest::resolve(const Utterance& u) const {
  if (u.path.is_absolute() || base_dir.empty()) return u.path;
  return base_dir / u.path;
}

const Utterance* Manifest::find(const std::string& id) const {
  for (const auto& u : entries) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

Manifest parse_manifest(const std::string& text, const std::string& origin) {
  static const char* kFields[] = {"id", "path", "transcript", "snr_db", "noise_type", "source_id"};
  Manifest m;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    const auto where = origin + ":" + std::to_string(lineno);
    auto fields = split(line, '\t');
    if (fields.size() > 6) {
      throw FormatError(where + ": too many fields (" + std::to_string(fields.size()) + ")");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (fields.size() <= i || trim(fields[i]).empty()) {
        throw FormatError(where + ": missing field '" + kFields[i] + "'");
      }
    }
    fields.resize(6);
    Utterance u;
    u.id = fields[0];
    u.path = fields[1];
    u.transcript = split_whitespace(fields[2]);
    try {
      if (!fields[3].empty()) u.snr_db = SnrDb::parse(fields[3]);
    } catch (const Error& e) {
      throw FormatError(where + ": bad field 'snr_db': " + e.what());
    }
    u.noise_type = fields[4];
    u.source_id = fields[5];
    if (!ids.insert(u.id).second) throw FormatError(where + ": duplicate id '" + u.id + "'");
    m.entries.push_back(std::move(u));
  }
  return m;
}

std::string format_manifest(const Manifest& manifest) {
  std::string out;
  for (const auto& u : manifest.entries) {
    check_field(u.id, "id");
    check_field(u.path.string(), "path");
    check_field(u.noise_type, "noise_type");
    check_field(u.source_id, "source_id");
    if (u.transcript.empty()) throw InvalidArgument("utterance '" + u.id + "' has empty transcript");
    out += u.id + '\t' + u.path.string() + '\t' + join_words(u.transcript);
    if (u.snr_db || !u.noise_type.empty() || !u.source_id.empty()) {
      out += '\t' + (u.snr_db ? u.snr_db->to_string() : std::string()) + '\t' + u.noise_type +
             '\t' + u.source_id;
    }
    out += '\n';
  }
  return out;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Manifest m = parse_manifest(ss.str(), path.string());
  m.base_dir = path.parent_path();
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  const std::string text = format_manifest(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

double utterance_duration(const Manifest& manifest, const Utterance& u) {
  return load_wav(manifest.resolve(u)).duration_seconds();
}

}  // namespace pdw
