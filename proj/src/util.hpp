/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCOMP_SRC_UTIL_HPP_
#define PCOMP_SRC_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pcomp::util {

// Shortest text that parses back to the same double.
std::string format_double(double v);
// Throws InputError mentioning `context` on malformed text.
double parse_double(std::string_view text, std::string_view context);
long parse_long(std::string_view text, std::string_view context);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);

// Minimal reader for headered, unquoted CSV files.
struct CsvFile {
  std::vector<std::string> header;
  // Rows hold views into `text`; the struct is not copyable safely, so keep
  // it where it was read.
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
  std::string text;
};

void read_csv(const std::filesystem::path& path, CsvFile& out);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Platform-independent draws from a std::mt19937_64.
double uniform01(std::mt19937_64& rng);
double normal(std::mt19937_64& rng);
// Uniform integer in [0, n).
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

}  // namespace pcomp::util

#endif  // PCOMP_SRC_UTIL_HPP_
