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

#include <gtest/gtest.h>

#include "hrr/tokenizer.hpp"
#include "support.hpp"

namespace {

std::vector<std::string> pieces(const hrr::Tokenizer& tok, std::string_view text) {
  std::vector<std::string> out;
  for (auto s : tok.token_spans(text)) out.emplace_back(text.substr(s.begin, s.end - s.begin));
  return out;
}

TEST(SimpleTokenizer, SplitsPunctuationIntoOwnTokens) {
  hrr::SimpleTokenizer tok;
  EXPECT_EQ(pieces(tok, "Dr. O'Neil, 42%"),
            (std::vector<std::string>{"Dr", ".", "O", "'", "Neil", ",", "42", "%"}));
  EXPECT_EQ(tok.count_tokens("Dr. O'Neil, 42%"), 8u);
}

TEST(SimpleTokenizer, KeepsUtf8SequencesTogether) {
  hrr::SimpleTokenizer tok;
  EXPECT_EQ(pieces(tok, "caf\xc3\xa9 na\xc3\xafve"), (std::vector<std::string>{"caf\xc3\xa9", "na\xc3\xafve"}));
}

TEST(SimpleTokenizer, CountMatchesSpans) {
  hrr::SimpleTokenizer tok;
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab Z9 .,;\n\t\xc3\xa9-";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    for (std::size_t i = rng() % 60; i > 0; --i) s.push_back(alphabet[rng() % alphabet.size()]);
    auto spans = tok.token_spans(s);
    EXPECT_EQ(tok.count_tokens(s), spans.size());
    for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_LE(spans[i - 1].end, spans[i].begin);
  }
}

TEST(SimpleTokenizer, EmptyAndBlankTextHaveNoTokens) {
  hrr::SimpleTokenizer tok;
  EXPECT_EQ(tok.count_tokens(""), 0u);
  EXPECT_EQ(tok.count_tokens(" \n\t "), 0u);
}

TEST(WhitespaceTokenizer, KeepsPunctuationAttached) {
  hrr::WhitespaceTokenizer tok;
  EXPECT_EQ(pieces(tok, "Dr. O'Neil,  42%\n"), (std::vector<std::string>{"Dr.", "O'Neil,", "42%"}));
}

TEST(LexicalTerms, LowercasesAndDropsPunctuation) {
  hrr::SimpleTokenizer tok;
  EXPECT_EQ(hrr::lexical_terms("Solar SUBSIDY, scheme!", tok),
            (std::vector<std::string>{"solar", "subsidy", "scheme"}));
  EXPECT_TRUE(hrr::lexical_terms("... !!", tok).empty());
}

TEST(MakeTokenizer, KnownAndUnknownNames) {
  EXPECT_EQ(hrr::make_tokenizer("simple")->name(), "simple");
  EXPECT_EQ(hrr::make_tokenizer("whitespace")->name(), "whitespace");
  EXPECT_HRR_ERROR(hrr::make_tokenizer("bpe"), hrr::ErrorCode::InvalidConfig);
}

}  // namespace
