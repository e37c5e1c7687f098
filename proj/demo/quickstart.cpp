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

// In-memory walkthrough: generate a small needle corpus, chunk it, index
// every level and compare the four retrievers on its queries.

#include <cstdio>
#include <iostream>

#include "hrr/hrr.hpp"

int main() {
  hrr::CorpusSpec spec;
  spec.n_docs = 6;
  spec.tokens_per_doc = 3000;
  spec.n_needles = 10;
  auto synthetic = hrr::generate(spec);

  hrr::ChunkingConfig chunking;
  chunking.build_fine_level = true;
  hrr::SimpleTokenizer tokenizer;
  hrr::Corpus corpus = hrr::build_corpus(synthetic.documents, chunking, tokenizer);

  hrr::HashedBowEmbedder embedder(spec.embedding_dimension);
  hrr::LexicalOverlapScorer reranker;
  hrr::IndexSet indices;
  for (hrr::Level level : hrr::kAllLevels) indices.put(hrr::build_index(corpus, level, embedder));

  hrr::RetrievalContext ctx{corpus, indices, embedder, reranker};
  auto queries = hrr::resolve_queries(synthetic, corpus);

  const auto& q = queries.front();
  std::printf("query: %s\ngold:  %s\n\n", q.query.c_str(), q.gold_parent.str().c_str());
  auto result = hrr::Retriever(ctx, {}).retrieve(q.query);
  for (const auto& stage : result.trace) std::printf("%-26s %zu entries\n", stage.name.c_str(), stage.entries.size());
  std::printf("\n");
  for (const auto& p : result.parents) std::printf("  %s\n", p.chunk_id.str().c_str());
  std::printf("\n");

  hrr::write_table(std::cout, hrr::compare(ctx, queries, hrr::kAllStrategies, {}));
}
