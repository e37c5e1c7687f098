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

// Retrieval strategies. All of them return unique parent chunks.
//
//   hrr   sentence top-k + intermediate top-k -> map sentences to their
//         intermediates -> dedup -> rerank intermediates -> top-k ->
//         map to parents -> dedup
//   base  parent top-k -> rerank parents -> top-k
//   c2p   top-k over parent, intermediate and fine chunks together -> map
//         every hit to its parent -> dedup -> rerank parents -> top-k
//   s2p   sentence top-k -> map to parents -> dedup -> rerank parents -> top-k
//
// Dedup rule, used everywhere: entries are stably sorted by (score desc,
// id asc) and the first occurrence of each id is kept, so a chunk reached
// several ways carries its best originating score.
//
// Every stage is recorded in RetrievalResult::trace.

#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hrr/doc_model.hpp"
#include "hrr/embedding.hpp"
#include "hrr/error.hpp"
#include "hrr/rerank.hpp"
#include "hrr/vector_index.hpp"

namespace hrr {

enum class Strategy { Hrr, Base, C2P, S2P };

inline constexpr Strategy kAllStrategies[] = {Strategy::Base, Strategy::C2P, Strategy::S2P, Strategy::Hrr};

constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Hrr: return "hrr";
    case Strategy::Base: return "base";
    case Strategy::C2P: return "c2p";
    case Strategy::S2P: return "s2p";
  }
  return "?";
}

/// Row label used in comparison tables.
constexpr std::string_view display_name(Strategy s) {
  switch (s) {
    case Strategy::Hrr: return "Results_Chunk_HRR";
    case Strategy::Base: return "Base Retriever + Reranker";
    case Strategy::C2P: return "C2P Retriever + Reranker";
    case Strategy::S2P: return "S2P Retriever + Reranker";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

/// Index levels a strategy searches.
inline std::vector<Level> required_levels(Strategy s) {
  switch (s) {
    case Strategy::Hrr: return {Level::Sentence, Level::Intermediate};
    case Strategy::Base: return {Level::Parent};
    case Strategy::C2P: return {Level::Parent, Level::Intermediate, Level::Fine};
    case Strategy::S2P: return {Level::Sentence};
  }
  return {};
}

struct RetrieverConfig {
  std::size_t similarity_top_k = 10;  // per searched level
  std::size_t rerank_top_k = 5;
  Strategy strategy = Strategy::Hrr;

  void validate() const {
    if (similarity_top_k == 0 || rerank_top_k == 0)
      fail(ErrorCode::InvalidConfig, "similarity_top_k and rerank_top_k must be at least 1");
  }
};

struct TraceEntry {
  ChunkId chunk_id;
  std::optional<double> score;
  std::optional<ChunkId> origin;  // the hit this entry was derived from

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TraceStage {
  std::string name;
  std::vector<TraceEntry> entries;

  std::vector<ChunkId> ids() const {
    std::vector<ChunkId> out;
    for (const auto& e : entries) out.push_back(e.chunk_id);
    return out;
  }
  friend bool operator==(const TraceStage&, const TraceStage&) = default;
};

struct RetrievedParent {
  ChunkId chunk_id;
  std::optional<double> score;
  // Chunks that led here, from the original hit down to the reranked chunk.
  std::vector<ChunkId> provenance;

  friend bool operator==(const RetrievedParent&, const RetrievedParent&) = default;
};

struct RetrievalResult {
  std::string query;
  Strategy strategy = Strategy::Hrr;
  std::vector<RetrievedParent> parents;
  std::vector<TraceStage> trace;
  bool rerank_fallback = false;

  const TraceStage& stage(std::string_view name) const {
    for (const auto& s : trace) {
      if (s.name == name) return s;
    }
    fail(ErrorCode::InvalidInput, "no trace stage named " + std::string(name));
  }

  std::vector<ChunkId> parent_ids() const {
    std::vector<ChunkId> out;
    for (const auto& p : parents) out.push_back(p.chunk_id);
    return out;
  }

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

/// Everything a retriever reads. All members are shared read-only.
struct RetrievalContext {
  const Corpus& corpus;
  const IndexSet& indices;
  const EmbeddingProvider& embedder;
  const RerankProvider& reranker;
  RerankOptions rerank_options{};
};

namespace detail {

struct Candidate {
  ChunkId id;
  double score = 0.0;
  std::optional<ChunkId> origin;
};

inline TraceStage hits_stage(std::string name, const std::vector<SearchHit>& hits) {
  TraceStage stage{std::move(name), {}};
  for (const auto& h : hits) stage.entries.push_back({h.chunk_id, h.score, std::nullopt});
  return stage;
}

inline TraceStage candidates_stage(std::string name, const std::vector<Candidate>& cands) {
  TraceStage stage{std::move(name), {}};
  for (const auto& c : cands) stage.entries.push_back({c.id, c.score, c.origin});
  return stage;
}

// Stable sort by (score desc, id asc), keep the first occurrence of each id.
inline std::vector<Candidate> dedup_best(std::vector<Candidate> cands) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return ranks_before(a.score, a.id, b.score, b.id);
  });
  std::unordered_set<ChunkId> seen;
  std::vector<Candidate> out;
  for (auto& c : cands) {
    if (seen.insert(c.id).second) out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Candidate> map_to_level(const Corpus& corpus, const std::vector<SearchHit>& hits,
                                           Level target) {
  std::vector<Candidate> out;
  for (const auto& h : hits) out.push_back({resolve_parent(corpus, h.chunk_id, target), h.score, h.chunk_id});
  return out;
}

inline TraceStage reranked_stage(std::string name, const RerankedList& list) {
  TraceStage stage{std::move(name), {}};
  for (const auto& item : list.items) stage.entries.push_back({item.chunk_id, item.score, std::nullopt});
  return stage;
}

inline EmbeddingVector embed_query(const RetrievalContext& ctx, std::string_view query) {
  if (ctx.corpus.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no chunks");
  return embed_one(ctx.embedder, query);
}

// Reranks `pool`, keeps rerank_top_k, and maps the survivors to unique
// parents (first occurrence wins, so a parent keeps the score of its best
// reranked representative).
inline void rerank_and_finish(const RetrievalContext& ctx, const RetrieverConfig& config,
                              const std::vector<Candidate>& pool,
                              const std::unordered_map<ChunkId, double>& context_signal,
                              RetrievalResult& result) {
  if (pool.empty()) {
    result.trace.push_back({"reranked", {}});
    result.trace.push_back({"top_k", {}});
    result.trace.push_back({"parents", {}});
    return;
  }
  RerankRequest request;
  request.query = result.query;
  for (const auto& c : pool) {
    auto it = context_signal.find(c.id);
    request.candidates.push_back({c.id, ctx.corpus.text(c.id), it == context_signal.end() ? 0.0 : it->second});
  }
  auto reranked = rerank(ctx.reranker, request, ctx.rerank_options);
  result.rerank_fallback = reranked.fallback_used;
  result.trace.push_back(reranked_stage("reranked", reranked));
  auto best = top_k(reranked, config.rerank_top_k);
  result.trace.push_back(reranked_stage("top_k", best));

  std::unordered_map<ChunkId, const Candidate*> by_id;
  for (const auto& c : pool) by_id.emplace(c.id, &c);

  TraceStage parents_stage{"parents", {}};
  std::unordered_set<ChunkId> seen;
  for (const auto& item : best.items) {
    ChunkId parent = resolve_parent(ctx.corpus, item.chunk_id, Level::Parent);
    if (!seen.insert(parent).second) continue;
    RetrievedParent rp{parent, item.score, {}};
    const Candidate* cand = by_id.at(item.chunk_id);
    if (cand->origin && *cand->origin != item.chunk_id) rp.provenance.push_back(*cand->origin);
    if (item.chunk_id != parent) rp.provenance.push_back(item.chunk_id);
    parents_stage.entries.push_back({parent, item.score, item.chunk_id});
    result.parents.push_back(std::move(rp));
  }
  result.trace.push_back(std::move(parents_stage));
}

}  // namespace detail

inline RetrievalResult retrieve_hrr(std::string_view query, const RetrievalContext& ctx,
                                    const RetrieverConfig& config) {
  config.validate();
  RetrievalResult result{std::string(query), Strategy::Hrr, {}, {}, false};
  const auto& sentences = ctx.indices.require(Level::Sentence);
  const auto& intermediates = ctx.indices.require(Level::Intermediate);
  auto q = detail::embed_query(ctx, query);

  auto sentence_hits = sentences.search(q, config.similarity_top_k);
  auto intermediate_hits = intermediates.search(q, config.similarity_top_k);
  result.trace.push_back(detail::hits_stage("sentence_hits", sentence_hits));
  result.trace.push_back(detail::hits_stage("intermediate_hits", intermediate_hits));

  auto mapped = detail::map_to_level(ctx.corpus, sentence_hits, Level::Intermediate);
  result.trace.push_back(detail::candidates_stage("sentence_to_intermediate", mapped));

  // Direct hits go first so that, on an exact score tie, the pool records
  // the intermediate as its own origin.
  std::vector<detail::Candidate> all;
  for (const auto& h : intermediate_hits) all.push_back({h.chunk_id, h.score, std::nullopt});
  all.insert(all.end(), mapped.begin(), mapped.end());
  auto pool = detail::dedup_best(std::move(all));
  result.trace.push_back(detail::candidates_stage("pool", pool));

  std::unordered_map<ChunkId, double> best_sentence;
  for (const auto& m : mapped) {
    auto [it, inserted] = best_sentence.emplace(m.id, m.score);
    if (!inserted) it->second = std::max(it->second, m.score);
  }
  detail::rerank_and_finish(ctx, config, pool, best_sentence, result);
  return result;
}

inline RetrievalResult retrieve_base(std::string_view query, const RetrievalContext& ctx,
                                     const RetrieverConfig& config) {
  config.validate();
  RetrievalResult result{std::string(query), Strategy::Base, {}, {}, false};
  const auto& parents = ctx.indices.require(Level::Parent);
  auto q = detail::embed_query(ctx, query);

  auto hits = parents.search(q, config.similarity_top_k);
  result.trace.push_back(detail::hits_stage("parent_hits", hits));
  std::vector<detail::Candidate> pool;
  for (const auto& h : hits) pool.push_back({h.chunk_id, h.score, std::nullopt});
  pool = detail::dedup_best(std::move(pool));
  result.trace.push_back(detail::candidates_stage("pool", pool));
  detail::rerank_and_finish(ctx, config, pool, {}, result);
  return result;
}

inline RetrievalResult retrieve_c2p(std::string_view query, const RetrievalContext& ctx,
                                    const RetrieverConfig& config) {
  config.validate();
  RetrievalResult result{std::string(query), Strategy::C2P, {}, {}, false};
  const auto& parents = ctx.indices.require(Level::Parent);
  const auto& intermediates = ctx.indices.require(Level::Intermediate);
  const auto& fine = ctx.indices.require(Level::Fine);
  auto q = detail::embed_query(ctx, query);

  // One candidate set over all three levels: the global top-k of the union
  // equals the top-k of the per-level top-k lists.
  std::vector<SearchHit> merged;
  for (const auto* index : {&parents, &intermediates, &fine}) {
    auto hits = index->search(q, config.similarity_top_k);
    merged.insert(merged.end(), hits.begin(), hits.end());
  }
  std::sort(merged.begin(), merged.end(), [](const SearchHit& a, const SearchHit& b) { return ranks_before(a, b); });
  if (merged.size() > config.similarity_top_k) merged.resize(config.similarity_top_k);
  result.trace.push_back(detail::hits_stage("merged_hits", merged));

  auto mapped = detail::map_to_level(ctx.corpus, merged, Level::Parent);
  result.trace.push_back(detail::candidates_stage("hit_to_parent", mapped));
  auto pool = detail::dedup_best(std::move(mapped));
  result.trace.push_back(detail::candidates_stage("pool", pool));
  detail::rerank_and_finish(ctx, config, pool, {}, result);
  return result;
}

inline RetrievalResult retrieve_s2p(std::string_view query, const RetrievalContext& ctx,
                                    const RetrieverConfig& config) {
  config.validate();
  RetrievalResult result{std::string(query), Strategy::S2P, {}, {}, false};
  const auto& sentences = ctx.indices.require(Level::Sentence);
  auto q = detail::embed_query(ctx, query);

  auto hits = sentences.search(q, config.similarity_top_k);
  result.trace.push_back(detail::hits_stage("sentence_hits", hits));
  auto mapped = detail::map_to_level(ctx.corpus, hits, Level::Parent);
  result.trace.push_back(detail::candidates_stage("sentence_to_parent", mapped));
  auto pool = detail::dedup_best(std::move(mapped));
  result.trace.push_back(detail::candidates_stage("pool", pool));
  detail::rerank_and_finish(ctx, config, pool, {}, result);
  return result;
}

inline RetrievalResult retrieve(std::string_view query, const RetrievalContext& ctx,
                                const RetrieverConfig& config) {
  switch (config.strategy) {
    case Strategy::Hrr: return retrieve_hrr(query, ctx, config);
    case Strategy::Base: return retrieve_base(query, ctx, config);
    case Strategy::C2P: return retrieve_c2p(query, ctx, config);
    case Strategy::S2P: return retrieve_s2p(query, ctx, config);
  }
  fail(ErrorCode::InvalidConfig, "unknown strategy");
}

/// Uniform handle over the four strategies.
class Retriever {
 public:
  Retriever(RetrievalContext ctx, RetrieverConfig config) : ctx_(ctx), config_(config) {
    config_.validate();
    for (Level level : required_levels(config_.strategy)) ctx_.indices.require(level);
  }

  Strategy strategy() const noexcept { return config_.strategy; }
  const RetrieverConfig& config() const noexcept { return config_; }
  RetrievalResult retrieve(std::string_view query) const { return hrr::retrieve(query, ctx_, config_); }

 private:
  RetrievalContext ctx_;
  RetrieverConfig config_;
};

inline nlohmann::json to_json(const RetrievalResult& result, bool include_trace) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  nlohmann::json j;
  j["query"] = result.query;
  j["strategy"] = to_string(result.strategy);
  j["rerank_fallback"] = result.rerank_fallback;
  auto parents = nlohmann::json::array();
  for (const auto& p : result.parents) {
    auto prov = nlohmann::json::array();
    for (const auto& id : p.provenance) prov.push_back(id.str());
    parents.push_back({{"id", p.chunk_id.str()}, {"score", opt(p.score)}, {"provenance", prov}});
  }
  j["parents"] = std::move(parents);
  if (include_trace) {
    auto stages = nlohmann::json::array();
    for (const auto& s : result.trace) {
      auto entries = nlohmann::json::array();
      for (const auto& e : s.entries) {
        nlohmann::json entry{{"id", e.chunk_id.str()}, {"score", opt(e.score)}};
        if (e.origin) entry["origin"] = e.origin->str();
        entries.push_back(std::move(entry));
      }
      stages.push_back({{"stage", s.name}, {"entries", std::move(entries)}});
    }
    j["trace"] = std::move(stages);
  }
  return j;
}

}  // namespace hrr
