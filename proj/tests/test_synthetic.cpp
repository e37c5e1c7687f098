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

#include <fstream>
#include <map>
#include <algorithm>
#include <cmath>

#include "hrr/chunker.hpp"
#include "hrr/eval.hpp"
#include "hrr/synthetic.hpp"
#include "support.hpp"

namespace {

hrr::CorpusSpec small_spec(std::uint64_t seed = 42) {
  hrr::CorpusSpec s;
  s.seed = seed;
  s.n_docs = 5;
  s.tokens_per_doc = 2000;
  s.n_needles = 10;
  return s;
}

TEST(Synthetic, SameSpecSameCorpus) {
  auto a = hrr::generate(small_spec());
  auto b = hrr::generate(small_spec());
  EXPECT_EQ(a.documents, b.documents);
  ASSERT_EQ(a.queries.size(), b.queries.size());
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].query, b.queries[i].query);
    EXPECT_EQ(a.queries[i].gold_span, b.queries[i].gold_span);
  }
  EXPECT_NE(hrr::generate(small_spec(43)).documents, a.documents);
}

TEST(Synthetic, ShapeFollowsSpec) {
  auto spec = small_spec();
  auto c = hrr::generate(spec);
  EXPECT_EQ(c.documents.size(), spec.n_docs);
  EXPECT_EQ(c.queries.size(), spec.n_needles);
  hrr::SimpleTokenizer tok;
  for (const auto& [id, text] : c.documents) EXPECT_GE(tok.count_tokens(text), spec.tokens_per_doc) << id;
}

TEST(Synthetic, NeedleTermsOccurOnlyInTheirSentence) {
  auto c = hrr::generate(small_spec());
  std::map<std::string, int> df;
  for (const auto& [id, text] : c.documents)
    for (const auto& t : hrr_test::oracle_terms(text)) ++df[t];
  for (const auto& q : c.queries) {
    ASSERT_EQ(q.needle_terms.size(), 3u);
    const std::string& doc = c.documents.at(q.gold_doc);
    std::string sentence = doc.substr(q.gold_span.begin, q.gold_span.size());
    auto sentence_terms = hrr_test::oracle_terms(sentence);
    auto query_terms = hrr_test::oracle_terms(q.query);
    for (const auto& n : q.needle_terms) {
      EXPECT_EQ(df[n], 1) << n;
      EXPECT_EQ(std::count(sentence_terms.begin(), sentence_terms.end(), n), 1) << n;
      EXPECT_EQ(std::count(query_terms.begin(), query_terms.end(), n), 1) << n;
    }
  }
}

// Brute force over every sentence chunk with the oracle embedder: the gold
// sentence must be the unique best match for its query.
TEST(Synthetic, NeedleSentenceIsTheUniqueNearestSentence) {
  hrr::CorpusSpec spec;  // full-size default corpus
  auto c = hrr::generate(spec);
  hrr::SimpleTokenizer tok;
  auto corpus = hrr::build_corpus(c.documents, hrr::ChunkingConfig{}, tok);
  std::vector<std::pair<const hrr::ChunkNode*, std::vector<double>>> sentences;
  for (const auto* n : corpus.level_chunks(hrr::Level::Sentence))
    sentences.emplace_back(n, hrr_test::oracle_embed(std::string(corpus.text(*n)), spec.embedding_dimension));
  for (const auto& q : c.queries) {
    auto qv = hrr_test::oracle_embed(q.query, spec.embedding_dimension);
    double best = -1, second = -1;
    const hrr::ChunkNode* arg = nullptr;
    for (const auto& [node, v] : sentences) {
      double s = hrr_test::oracle_dot(qv, v);
      if (s > best) {
        second = best;
        best = s;
        arg = node;
      } else if (s > second) {
        second = s;
      }
    }
    ASSERT_NE(arg, nullptr);
    EXPECT_EQ(arg->doc_id, q.gold_doc);
    EXPECT_TRUE(arg->span.contains(q.gold_span)) << q.query;
    EXPECT_NEAR(best, 5.0 / (std::sqrt(5.0) * 3.0), 1e-9);
    EXPECT_LE(second, std::sqrt(2.0) / std::sqrt(5.0) + 1e-9);
  }
}

TEST(Synthetic, InfeasibleSpecsAreRejected) {
  auto spec = small_spec();
  spec.n_docs = 0;
  EXPECT_HRR_ERROR(hrr::generate(spec), hrr::ErrorCode::SpecInfeasible);
  spec = small_spec();
  spec.tokens_per_doc = 10;
  EXPECT_HRR_ERROR(hrr::generate(spec), hrr::ErrorCode::SpecInfeasible);
  spec = small_spec();
  spec.distractor_density = 1.5;
  EXPECT_HRR_ERROR(hrr::generate(spec), hrr::ErrorCode::SpecInfeasible);
  spec = small_spec();
  spec.n_docs = 1;
  spec.tokens_per_doc = 64;
  spec.n_needles = 50;
  EXPECT_HRR_ERROR(hrr::generate(spec), hrr::ErrorCode::SpecInfeasible);
  spec = small_spec();
  spec.embedding_dimension = 16;  // too few buckets for 30 distinct needle terms
  EXPECT_HRR_ERROR(hrr::generate(spec), hrr::ErrorCode::SpecInfeasible);
}

TEST(Synthetic, WrittenQuerySetResolvesToTheSameGold) {
  auto c = hrr::generate(small_spec());
  hrr_test::TempDir dir("synth");
  hrr::write_synthetic(c, dir.path());
  hrr::SimpleTokenizer tok;
  auto corpus = hrr::build_corpus(c.documents, hrr::ChunkingConfig{}, tok);
  std::ifstream is(dir.path() / "queries.jsonl");
  auto read = hrr::read_query_set(is, corpus);
  auto direct = hrr::resolve_queries(c, corpus);
  ASSERT_EQ(read.size(), direct.size());
  for (std::size_t i = 0; i < read.size(); ++i) {
    EXPECT_EQ(read[i].query, direct[i].query);
    EXPECT_EQ(read[i].gold_parent, direct[i].gold_parent);
  }
  for (const auto& [id, text] : c.documents) {
    std::ifstream d(dir.path() / "docs" / id, std::ios::binary);
    std::string back((std::istreambuf_iterator<char>(d)), {});
    EXPECT_EQ(back, text);
  }
}

}  // namespace
