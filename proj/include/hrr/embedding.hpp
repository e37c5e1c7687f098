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
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrr/error.hpp"
#include "hrr/hash.hpp"
#include "hrr/tokenizer.hpp"

namespace hrr {

/// Sequential double-precision dot product. Every scoring path goes through
/// this so scores are bit-identical regardless of caller.
inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double sum = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

/// Unit-norm, finite embedding. Only constructible through the checked
/// factories below.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  /// L2-normalizes `raw`. Fails on non-finite entries or a zero vector.
  static EmbeddingVector normalize(std::vector<float> raw) {
    if (raw.empty()) fail(ErrorCode::InvalidInput, "embedding has dimension 0");
    double sq = 0.0;
    for (float v : raw) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidResponse, "embedding has non-finite entry");
      sq += static_cast<double>(v) * static_cast<double>(v);
    }
    if (!(sq > 0.0) || !std::isfinite(sq)) fail(ErrorCode::InvalidResponse, "embedding has zero norm");
    const double inv = 1.0 / std::sqrt(sq);
    for (float& v : raw) v = static_cast<float>(static_cast<double>(v) * inv);
    return EmbeddingVector(std::move(raw));
  }

  /// Accepts values that are already unit norm (e.g. read back from a
  /// snapshot). Fails when the norm is off by more than `tolerance`.
  static EmbeddingVector from_unit(std::vector<float> values, double tolerance = 1e-5) {
    if (values.empty()) fail(ErrorCode::InvalidInput, "embedding has dimension 0");
    double sq = 0.0;
    for (float v : values) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidResponse, "embedding has non-finite entry");
      sq += static_cast<double>(v) * static_cast<double>(v);
    }
    if (std::abs(std::sqrt(sq) - 1.0) > tolerance)
      fail(ErrorCode::InvalidResponse, "embedding is not unit norm");
    return EmbeddingVector(std::move(values));
  }

  std::span<const float> values() const noexcept { return values_; }
  std::size_t dimension() const noexcept { return values_.size(); }

  double norm() const noexcept { return std::sqrt(dot(values_, values_)); }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}
  std::vector<float> values_;
};

/// Cosine of two unit vectors, i.e. their dot product clamped to [-1, 1].
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    fail(ErrorCode::DimensionMismatch,
         std::to_string(a.dimension()) + " vs " + std::to_string(b.dimension()));
  }
  return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

/// Text encoder contract. Implementations must be deterministic (same text,
/// same vector), return vectors of dimension() only, and be safe to call
/// from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string_view name() const = 0;
  virtual std::size_t dimension() const = 0;
  /// One vector per text, same order. Called with at most one batch worth of texts.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string_view> texts) const = 0;
};

inline constexpr std::size_t kDefaultEmbedBatch = 64;

/// Embeds `texts` in batches and checks the provider's output shape.
inline std::vector<EmbeddingVector> embed_batch(const EmbeddingProvider& provider,
                                                std::span<const std::string_view> texts,
                                                std::size_t batch_size = kDefaultEmbedBatch) {
  if (texts.empty()) fail(ErrorCode::InvalidInput, "embed_batch needs at least one text");
  for (auto t : texts) {
    if (t.empty()) fail(ErrorCode::InvalidInput, "cannot embed an empty string");
  }
  batch_size = std::max<std::size_t>(batch_size, 1);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t offset = 0; offset < texts.size(); offset += batch_size) {
    auto batch = texts.subspan(offset, std::min(batch_size, texts.size() - offset));
    auto vectors = provider.embed(batch);
    if (vectors.size() != batch.size()) {
      fail(ErrorCode::InvalidResponse, "provider returned " + std::to_string(vectors.size()) +
                                           " vectors for " + std::to_string(batch.size()) + " texts");
    }
    for (auto& v : vectors) {
      if (v.dimension() != provider.dimension()) {
        fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(provider.dimension()) +
                                               ", got " + std::to_string(v.dimension()));
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

inline EmbeddingVector embed_one(const EmbeddingProvider& provider, std::string_view text) {
  std::string_view one[] = {text};
  return std::move(embed_batch(provider, one).front());
}

/// Hashed bag-of-words embedder for offline use.
///
/// Each lexical term (see lexical_terms) is hashed with 64-bit FNV-1a and
/// counted in bucket `hash % dimension`; the count vector is L2-normalized.
/// Text without any lexical term maps to the bucket of the empty string.
/// Word order is ignored, so permutations of the same words embed
/// identically; it captures keyword overlap and nothing semantic.
class HashedBowEmbedder final : public EmbeddingProvider {
 public:
  explicit HashedBowEmbedder(std::size_t dimension = 384,
                             std::shared_ptr<const Tokenizer> tokenizer = std::make_shared<SimpleTokenizer>())
      : dimension_(dimension), tokenizer_(std::move(tokenizer)) {
    if (dimension_ == 0) fail(ErrorCode::InvalidConfig, "embedding dimension must be positive");
  }

  std::string_view name() const override { return "hashed-bow"; }
  std::size_t dimension() const override { return dimension_; }

  std::size_t bucket(std::string_view term) const { return fnv1a64(term) % dimension_; }

  EmbeddingVector embed_text(std::string_view text) const {
    std::vector<float> counts(dimension_, 0.0f);
    auto terms = lexical_terms(text, *tokenizer_);
    if (terms.empty()) {
      counts[bucket("")] = 1.0f;
    } else {
      for (const auto& term : terms) counts[bucket(term)] += 1.0f;
    }
    return EmbeddingVector::normalize(std::move(counts));
  }

  std::vector<EmbeddingVector> embed(std::span<const std::string_view> texts) const override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto t : texts) out.push_back(embed_text(t));
    return out;
  }

 private:
  std::size_t dimension_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

}  // namespace hrr
