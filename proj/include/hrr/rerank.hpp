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

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hrr/doc_model.hpp"
#include "hrr/error.hpp"
#include "hrr/tokenizer.hpp"
#include "hrr/vector_index.hpp"

namespace hrr {

/// Pairwise relevance scorer: one score per document, positionally aligned,
/// higher means more relevant. Must be callable from several threads.
class RerankProvider {
 public:
  virtual ~RerankProvider() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<double> score(std::string_view query,
                                    std::span<const std::string_view> documents) const = 0;
};

/// Offline scorer: |T(q) ∩ T(c)| / sqrt(|T(q)| * |T(c)|) where T is the set
/// of lexical terms (lowercased, see lexical_terms). 0 when either set is empty.
class LexicalOverlapScorer final : public RerankProvider {
 public:
  explicit LexicalOverlapScorer(std::shared_ptr<const Tokenizer> tokenizer = std::make_shared<SimpleTokenizer>())
      : tokenizer_(std::move(tokenizer)) {}

  std::string_view name() const override { return "lexical"; }

  std::vector<double> score(std::string_view query,
                            std::span<const std::string_view> documents) const override {
    auto q = terms(query);
    std::vector<double> out;
    out.reserve(documents.size());
    for (auto doc : documents) {
      auto c = terms(doc);
      if (q.empty() || c.empty()) {
        out.push_back(0.0);
        continue;
      }
      std::size_t shared = 0;
      for (const auto& t : q) shared += c.count(t);
      out.push_back(static_cast<double>(shared) /
                    std::sqrt(static_cast<double>(q.size()) * static_cast<double>(c.size())));
    }
    return out;
  }

 private:
  std::set<std::string> terms(std::string_view text) const {
    auto list = lexical_terms(text, *tokenizer_);
    return std::set<std::string>(list.begin(), list.end());
  }

  std::shared_ptr<const Tokenizer> tokenizer_;
};

struct RerankCandidate {
  ChunkId id;
  std::string_view text;
  // Extra evidence mixed into the score with RerankOptions::context_weight,
  // e.g. the best similarity of a sentence inside the chunk.
  double context_signal = 0.0;
};

struct RerankRequest {
  std::string query;
  std::vector<RerankCandidate> candidates;

  void validate() const {
    if (candidates.empty()) fail(ErrorCode::InvalidRequest, "rerank request has no candidates");
    std::unordered_set<ChunkId> ids;
    for (const auto& c : candidates) {
      if (!ids.insert(c.id).second) fail(ErrorCode::InvalidRequest, "duplicate candidate " + c.id.str());
    }
  }
};

struct ScoredCandidate {
  ChunkId chunk_id;
  std::optional<double> score;  // unset when the fallback passed retrieval order through

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

struct RerankedList {
  std::vector<ScoredCandidate> items;
  bool fallback_used = false;

  std::size_t size() const noexcept { return items.size(); }
  friend bool operator==(const RerankedList&, const RerankedList&) = default;
};

enum class RerankFallback { Error, Passthrough };

inline std::optional<RerankFallback> parse_rerank_fallback(std::string_view name) {
  if (name == "error") return RerankFallback::Error;
  if (name == "passthrough") return RerankFallback::Passthrough;
  return std::nullopt;
}

struct RerankOptions {
  RerankFallback fallback = RerankFallback::Error;
  double context_weight = 0.0;
};

/// Scores the whole request as one batch and returns a permutation of the
/// candidates ordered by (score desc, id asc).
///
/// If the provider fails and the fallback is Passthrough, the candidates come
/// back in request order with no scores.
inline RerankedList rerank(const RerankProvider& provider, const RerankRequest& request,
                           const RerankOptions& options = {}) {
  request.validate();
  std::vector<std::string_view> docs;
  docs.reserve(request.candidates.size());
  for (const auto& c : request.candidates) docs.push_back(c.text);

  std::vector<double> scores;
  try {
    scores = provider.score(request.query, docs);
    if (scores.size() != docs.size()) {
      fail(ErrorCode::InvalidResponse, "reranker returned " + std::to_string(scores.size()) +
                                           " scores for " + std::to_string(docs.size()) + " documents");
    }
    for (double s : scores) {
      if (!std::isfinite(s)) fail(ErrorCode::InvalidResponse, "reranker returned a non-finite score");
    }
  } catch (const Error& e) {
    bool provider_fault =
        e.code() == ErrorCode::ProviderUnavailable || e.code() == ErrorCode::InvalidResponse;
    if (!provider_fault || options.fallback != RerankFallback::Passthrough) throw;
    RerankedList passthrough;
    passthrough.fallback_used = true;
    for (const auto& c : request.candidates) passthrough.items.push_back({c.id, std::nullopt});
    return passthrough;
  }

  RerankedList out;
  out.items.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& c = request.candidates[i];
    out.items.push_back({c.id, scores[i] + options.context_weight * c.context_signal});
  }
  std::sort(out.items.begin(), out.items.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    return ranks_before(*a.score, a.chunk_id, *b.score, b.chunk_id);
  });
  return out;
}

/// First min(k, size) items, order preserved.
inline RerankedList top_k(const RerankedList& list, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidInput, "k must be at least 1");
  RerankedList out;
  out.fallback_used = list.fallback_used;
  const std::size_t take = std::min(k, list.items.size());
  out.items.assign(list.items.begin(), list.items.begin() + static_cast<std::ptrdiff_t>(take));
  return out;
}

}  // namespace hrr
