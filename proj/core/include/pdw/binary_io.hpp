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
#include <span>
#include <string>
#include <vector>

namespace pdw {

// Little-endian serialization helpers for the checkpoint formats.
class BinaryWriter {
 public:
  void bytes(const void* data, std::size_t n);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  // Values are narrowed to float32.
  void f32_array(std::span<const double> values);

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  // Writes to a temporary sibling then renames; throws IoError on failure.
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);
  explicit BinaryReader(std::vector<std::uint8_t> data, std::string origin = "buffer");

  void bytes(void* out, std::size_t n);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<double> f32_array(std::size_t count);
  void expect_end() const;

 private:
  void need(std::size_t n) const;
  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string origin_;
};

}  // namespace pdw
