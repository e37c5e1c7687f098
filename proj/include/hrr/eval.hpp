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

// Hit Rate and Mean Reciprocal Rank over labeled queries.
//
// A query is relevant-hit when its gold parent id appears in the returned
// parents; K is whatever length the retriever returned. Misses add 0 to the
// reciprocal-rank sum.

#pragma once

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hrr/doc_model.hpp"
#include "hrr/error.hpp"
#include "hrr/retrievers.hpp"

namespace hrr {

struct LabeledQuery {
  std::string query;
  ChunkId gold_parent;
  std::optional<DocumentId> gold_doc;
};

struct EvalRecord {
  std::size_t query_index = 0;
  bool hit = false;
  std::optional<std::size_t> first_rank;  // 1-based; present iff hit

  double reciprocal() const { return first_rank ? 1.0 / static_cast<double>(*first_rank) : 0.0; }
  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct EvalSummary {
  Strategy strategy = Strategy::Hrr;
  double hit_rate = 0.0;
  double mrr = 0.0;
  std::size_t n = 0;
  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

inline void check_gold(const Corpus& corpus, const LabeledQuery& gold) {
  const ChunkNode* node = corpus.find(gold.gold_parent);
  if (node == nullptr || node->level != Level::Parent) {
    fail(ErrorCode::GoldNotInCorpus, "gold parent " + gold.gold_parent.str() + " is not a parent chunk");
  }
}

inline EvalRecord score_query(const Corpus& corpus, const RetrievalResult& result,
                              const LabeledQuery& gold, std::size_t query_index = 0) {
  check_gold(corpus, gold);
  EvalRecord record;
  record.query_index = query_index;
  for (std::size_t i = 0; i < result.parents.size(); ++i) {
    if (result.parents[i].chunk_id == gold.gold_parent) {
      record.hit = true;
      record.first_rank = i + 1;
      break;
    }
  }
  return record;
}

inline EvalSummary summarize(Strategy strategy, std::span<const EvalRecord> records) {
  if (records.empty()) fail(ErrorCode::EmptyQuerySet, "no evaluation records");
  std::size_t hits = 0;
  double reciprocal_sum = 0.0;
  for (const auto& r : records) {
    if (r.hit) ++hits;
    reciprocal_sum += r.reciprocal();
  }
  const auto n = static_cast<double>(records.size());
  return {strategy, static_cast<double>(hits) / n, reciprocal_sum / n, records.size()};
}

/// Every labeled query whose gold parent is missing, one message each.
inline std::vector<std::string> query_set_errors(const Corpus& corpus, std::span<const LabeledQuery> queries) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    try {
      check_gold(corpus, queries[i]);
    } catch (const Error& e) {
      out.push_back("query " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

struct StrategyReport {
  EvalSummary summary;
  std::vector<EvalRecord> records;
  std::vector<RetrievalResult> results;
};

/// Runs one strategy over all queries. Queries are independent; with
/// `threads` > 1 they run concurrently and land in their own slots, so the
/// report does not depend on scheduling.
inline StrategyReport evaluate_strategy(const RetrievalContext& ctx, const RetrieverConfig& config,
                                        std::span<const LabeledQuery> queries, unsigned threads = 1) {
  if (queries.empty()) fail(ErrorCode::EmptyQuerySet, "query set is empty");
  StrategyReport report;
  report.records.resize(queries.size());
  report.results.resize(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
  Retriever retriever(ctx, config);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < queries.size(); i += stride) {
      try {
        report.results[i] = retriever.retrieve(queries[i].query);
        report.records[i] = score_query(ctx.corpus, report.results[i], queries[i], i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(queries.size())));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  report.summary = summarize(config.strategy, report.records);
  return report;
}

/// One summary per strategy over the same queries and providers. Fails
/// before retrieving anything if any gold parent is missing.
inline std::vector<StrategyReport> compare_detailed(const RetrievalContext& ctx, std::span<const LabeledQuery> queries,
                                                    std::span<const Strategy> strategies,
                                                    const RetrieverConfig& config, unsigned threads = 1) {
  if (queries.empty()) fail(ErrorCode::EmptyQuerySet, "query set is empty");
  auto errors = query_set_errors(ctx.corpus, queries);
  if (!errors.empty()) {
    std::string message;
    for (const auto& e : errors) message += "\n  " + e;
    fail(ErrorCode::GoldNotInCorpus, std::to_string(errors.size()) + " labeled queries are invalid:" + message);
  }
  std::vector<StrategyReport> out;
  for (Strategy s : strategies) {
    RetrieverConfig c = config;
    c.strategy = s;
    out.push_back(evaluate_strategy(ctx, c, queries, threads));
  }
  return out;
}

inline std::vector<EvalSummary> compare(const RetrievalContext& ctx, std::span<const LabeledQuery> queries,
                                        std::span<const Strategy> strategies, const RetrieverConfig& config,
                                        unsigned threads = 1) {
  std::vector<EvalSummary> out;
  for (auto& report : compare_detailed(ctx, queries, strategies, config, threads)) out.push_back(report.summary);
  return out;
}

// ---------------------------------------------------------------------------
// Query-set file: one JSON object per line, either
//   {"query": ..., "gold_parent_id": ...}
// or
//   {"query": ..., "gold_doc_id": ..., "gold_char_span": [begin, end]}
// The second form is resolved to the parent chunk containing the span.

/// Parent chunk of `doc` whose span contains `span`; if the span crosses
/// parents, the one containing its first byte.
inline ChunkId resolve_gold_span(const Corpus& corpus, const DocumentId& doc, const CharSpan& span) {
  const ChunkNode* fallback = nullptr;
  for (const auto* node : corpus.level_chunks(Level::Parent)) {
    if (node->doc_id != doc) continue;
    if (node->span.contains(span)) return node->id;
    if (fallback == nullptr && node->span.begin <= span.begin && span.begin < node->span.end) fallback = node;
  }
  if (fallback == nullptr) {
    fail(ErrorCode::GoldNotInCorpus, "no parent chunk of " + doc + " covers byte " + std::to_string(span.begin));
  }
  return fallback->id;
}

inline std::vector<LabeledQuery> read_query_set(std::istream& is, const Corpus& corpus) {
  std::vector<LabeledQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      LabeledQuery q;
      q.query = rec.at("query").get<std::string>();
      if (rec.contains("gold_doc_id")) q.gold_doc = rec["gold_doc_id"].get<std::string>();
      if (rec.contains("gold_parent_id")) {
        q.gold_parent = ChunkId(rec["gold_parent_id"].get<std::string>());
      } else if (q.gold_doc && rec.contains("gold_char_span")) {
        const auto& s = rec["gold_char_span"];
        q.gold_parent = resolve_gold_span(corpus, *q.gold_doc,
                                          CharSpan{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      } else {
        fail(ErrorCode::Format, "line " + std::to_string(line_no) +
                                    ": needs gold_parent_id or gold_doc_id + gold_char_span");
      }
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "query set line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::string format_fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

/// Aligned text table: Retriever | Hit Rate | MRR.
inline void write_table(std::ostream& os, std::span<const EvalSummary> rows) {
  std::size_t width = std::string_view("Retriever").size();
  for (const auto& r : rows) width = std::max(width, display_name(r.strategy).size());
  width += 2;
  os << std::left << std::setw(static_cast<int>(width)) << "Retriever" << std::setw(10) << "Hit Rate"
     << "MRR" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << display_name(r.strategy) << std::setw(10)
       << format_fixed6(r.hit_rate) << format_fixed6(r.mrr) << '\n';
  }
}

/// One JSON object per strategy per line.
inline void write_machine(std::ostream& os, std::span<const EvalSummary> rows) {
  for (const auto& r : rows) {
    nlohmann::json j{{"strategy", to_string(r.strategy)},
                     {"retriever", display_name(r.strategy)},
                     {"hit_rate", r.hit_rate},
                     {"mrr", r.mrr},
                     {"n", r.n}};
    os << j.dump() << '\n';
  }
}

}  // namespace hrr
