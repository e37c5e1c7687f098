/*
 * Copyright 2026 The HRR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shared helpers for the test binaries. The oracles here are written
// independently of the library code they check.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hrr/error.hpp"

namespace hrr_test {

/// Expects `expr` to throw hrr::Error with `code`.
#define EXPECT_HRR_ERROR(expr, error_code)                                   \
  do {                                                                       \
    try {                                                                    \
      (void)(expr);                                                          \
      ADD_FAILURE() << "expected " << hrr::to_string(error_code);            \
    } catch (const hrr::Error& e) {                                          \
      EXPECT_EQ(e.code(), error_code) << e.what();                           \
    }                                                                        \
  } while (0)

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("hrr_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// FNV-1a, 64-bit, straight from the published constants.
inline std::uint64_t oracle_fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Lowercased alphanumeric words; punctuation and whitespace dropped. Matches
// the simple tokenizer's term set on ASCII text.
inline std::vector<std::string> oracle_terms(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Hashed bag of words, normalized, in double precision.
inline std::vector<double> oracle_embed(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  auto terms = oracle_terms(text);
  if (terms.empty()) terms.push_back("");
  for (const auto& t : terms) v[oracle_fnv(t) % dim] += 1.0;
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

inline double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// |Q ∩ C| / sqrt(|Q| |C|) over term sets.
inline double oracle_overlap(const std::string& query, const std::string& doc) {
  auto qv = oracle_terms(query);
  auto cv = oracle_terms(doc);
  std::set<std::string> q(qv.begin(), qv.end()), c(cv.begin(), cv.end());
  if (q.empty() || c.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : q) common += c.count(t);
  return static_cast<double>(common) / std::sqrt(static_cast<double>(q.size() * c.size()));
}

// A sentence of exactly `tokens` simple-tokenizer tokens: tokens-1 words
// plus the closing period.
inline std::string sentence_of(std::size_t tokens, std::mt19937_64& rng) {
  static const char* words[] = {"alpha", "beta", "gamma", "delta", "omega", "river", "stone", "cloud"};
  std::string s = "Word";
  for (std::size_t i = 1; i + 1 < tokens; ++i) {
    s += ' ';
    s += words[rng() % 8];
  }
  s += '.';
  return s;
}

}  // namespace hrr_test
