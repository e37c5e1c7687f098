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

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hrr/error.hpp"

namespace hrr {

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

/// Token accounting used for chunk budgets and lexical features.
///
/// Implementations must return spans that are ordered, non-overlapping and
/// aligned to character boundaries, and must tokenize any substring that
/// starts and ends on token boundaries exactly as the containing text does.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::string_view name() const = 0;
  virtual std::vector<TokenSpan> token_spans(std::string_view text) const = 0;

  virtual std::size_t count_tokens(std::string_view text) const { return token_spans(text).size(); }

  /// Start offsets of every token, strictly increasing.
  std::vector<std::size_t> token_boundaries(std::string_view text) const {
    std::vector<std::size_t> out;
    for (const auto& span : token_spans(text)) out.push_back(span.begin);
    return out;
  }
};

constexpr bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Bytes >= 0x80 count as word bytes so multi-byte UTF-8 sequences never split.
constexpr bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

/// Default tokenizer.
///
/// Rules, applied left to right over bytes:
///   - whitespace separates tokens and is never part of one;
///   - a maximal run of word bytes (ASCII letters, digits, any byte >= 0x80)
///     is one token;
///   - every other byte (ASCII punctuation and symbols) is a token by itself.
/// So "Dr. O'Neil, 42%" is `Dr` `.` `O` `'` `Neil` `,` `42` `%`.
class SimpleTokenizer final : public Tokenizer {
 public:
  std::string_view name() const override { return "simple"; }

  std::vector<TokenSpan> token_spans(std::string_view text) const override {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
      auto c = static_cast<unsigned char>(text[i]);
      if (is_space_byte(c)) {
        ++i;
      } else if (is_word_byte(c)) {
        std::size_t start = i;
        while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        out.push_back({start, i});
      } else {
        out.push_back({i, i + 1});
        ++i;
      }
    }
    return out;
  }

  std::size_t count_tokens(std::string_view text) const override {
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
      auto c = static_cast<unsigned char>(text[i]);
      if (is_space_byte(c)) {
        ++i;
        continue;
      }
      ++count;
      if (is_word_byte(c)) {
        while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
      } else {
        ++i;
      }
    }
    return count;
  }
};

/// Whitespace-delimited tokens; punctuation stays attached to words.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::string_view name() const override { return "whitespace"; }

  std::vector<TokenSpan> token_spans(std::string_view text) const override {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
      if (is_space_byte(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < n && !is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({start, i});
    }
    return out;
  }
};

inline std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
  if (name == "simple") return std::make_unique<SimpleTokenizer>();
  if (name == "whitespace") return std::make_unique<WhitespaceTokenizer>();
  fail(ErrorCode::InvalidConfig, "unknown tokenizer: " + std::string(name));
}

/// Lowercased tokens that contain at least one letter or digit. These are the
/// terms the hashed embedder and the lexical scorer operate on.
inline std::vector<std::string> lexical_terms(std::string_view text, const Tokenizer& tokenizer) {
  std::vector<std::string> out;
  for (const auto& span : tokenizer.token_spans(text)) {
    std::string term;
    term.reserve(span.end - span.begin);
    bool has_word_byte = false;
    for (std::size_t i = span.begin; i < span.end; ++i) {
      auto c = static_cast<unsigned char>(text[i]);
      if (is_word_byte(c)) has_word_byte = true;
      term.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    }
    if (has_word_byte) out.push_back(std::move(term));
  }
  return out;
}

}  // namespace hrr
