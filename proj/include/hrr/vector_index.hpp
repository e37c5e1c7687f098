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

// Per-level vector index.
//
// Exact search is a full scan and is the reference every other search path
// is checked against. An optional proximity graph (single-layer navigable
// small world) answers approximate queries over the same entries.
//
// Results are ordered by score descending, then ChunkId ascending, so a
// search is a deterministic function of (index, query, k).

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hrr/doc_model.hpp"
#include "hrr/embedding.hpp"
#include "hrr/error.hpp"

namespace hrr {

struct SearchHit {
  ChunkId chunk_id;
  double score = 0.0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Total order used for every ranked list: higher score first, then smaller id.
inline bool ranks_before(double score_a, const ChunkId& id_a, double score_b, const ChunkId& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

inline bool ranks_before(const SearchHit& a, const SearchHit& b) {
  return ranks_before(a.score, a.chunk_id, b.score, b.chunk_id);
}

struct GraphParams {
  std::size_t max_degree = 16;
  std::size_t ef_construction = 128;
  std::size_t ef_search = 96;
  std::uint64_t seed = 42;
};

class LevelIndex {
 public:
  LevelIndex(Level level, std::size_t dimension) : level_(level), dimension_(dimension) {
    if (dimension_ == 0) fail(ErrorCode::InvalidInput, "index dimension must be positive");
  }

  Level level() const noexcept { return level_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const ChunkId& id(std::size_t i) const { return ids_.at(i); }
  std::span<const float> vector(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dimension_, dimension_);
  }

  void add(ChunkId id, const EmbeddingVector& vec) {
    if (vec.dimension() != dimension_) {
      fail(ErrorCode::DimensionMismatch, "index is " + std::to_string(dimension_) + "-d, vector is " +
                                             std::to_string(vec.dimension()) + "-d");
    }
    if (!seen_.insert(id).second) fail(ErrorCode::InvalidInput, "duplicate index entry " + id.str());
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), vec.values().begin(), vec.values().end());
    graph_.reset();
  }

  /// Builds the approximate search graph; afterwards search() uses it.
  void build_graph(const GraphParams& params);
  bool has_graph() const noexcept { return graph_.has_value(); }

  /// Exact top-k under (score desc, id asc).
  std::vector<SearchHit> search_exact(const EmbeddingVector& query, std::size_t k) const {
    check_query(query, k);
    std::vector<std::size_t> order(ids_.size());
    std::vector<double> scores(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      order[i] = i;
      scores[i] = dot(query.values(), vector(i));
    }
    const std::size_t take = std::min(k, order.size());
    auto before = [&](std::size_t a, std::size_t b) {
      return ranks_before(scores[a], ids_[a], scores[b], ids_[b]);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      before);
    std::vector<SearchHit> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({ids_[order[i]], scores[order[i]]});
    return out;
  }

  /// Graph search when a graph is built, exact search otherwise.
  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k) const {
    if (!graph_) return search_exact(query, k);
    check_query(query, k);
    return graph_search(query.values(), std::max(k, graph_->params.ef_search), k);
  }

  void save(std::ostream& os) const;
  static LevelIndex load(std::istream& is);

  friend bool operator==(const LevelIndex& a, const LevelIndex& b) {
    return a.level_ == b.level_ && a.dimension_ == b.dimension_ && a.ids_ == b.ids_ &&
           a.data_ == b.data_;
  }

 private:
  struct Graph {
    GraphParams params;
    std::size_t entry = 0;
    std::vector<std::vector<std::uint32_t>> neighbors;
  };

  struct Scored {
    double score;
    std::uint32_t node;
  };

  void check_query(const EmbeddingVector& query, std::size_t k) const {
    if (k == 0) fail(ErrorCode::InvalidInput, "k must be at least 1");
    if (query.dimension() != dimension_) {
      fail(ErrorCode::DimensionMismatch, "query is " + std::to_string(query.dimension()) +
                                             "-d, index is " + std::to_string(dimension_) + "-d");
    }
  }

  bool better(const Scored& a, const Scored& b) const {
    return ranks_before(a.score, ids_[a.node], b.score, ids_[b.node]);
  }

  // Beam search over the graph restricted to nodes in `live` (all nodes when
  // live is empty). Returns up to `k` nodes, best first.
  std::vector<Scored> beam(std::span<const float> query, std::size_t ef, std::size_t k,
                           std::size_t live) const;

  std::vector<SearchHit> graph_search(std::span<const float> query, std::size_t ef,
                                      std::size_t k) const {
    std::vector<SearchHit> out;
    for (const auto& s : beam(query, ef, k, ids_.size())) out.push_back({ids_[s.node], s.score});
    return out;
  }

  Level level_;
  std::size_t dimension_;
  std::vector<ChunkId> ids_;
  std::vector<float> data_;
  std::unordered_set<ChunkId> seen_;
  std::optional<Graph> graph_;
};

inline std::vector<LevelIndex::Scored> LevelIndex::beam(std::span<const float> query, std::size_t ef,
                                                        std::size_t k, std::size_t live) const {
  const auto& g = *graph_;
  if (live == 0) return {};
  auto worse_first = [this](const Scored& a, const Scored& b) { return better(a, b); };
  auto best_first = [this](const Scored& a, const Scored& b) { return better(b, a); };
  std::priority_queue<Scored, std::vector<Scored>, decltype(best_first)> frontier(best_first);
  std::priority_queue<Scored, std::vector<Scored>, decltype(worse_first)> found(worse_first);
  std::vector<char> visited(live, 0);

  const auto entry = static_cast<std::uint32_t>(g.entry);
  Scored start{dot(query, vector(entry)), entry};
  visited[entry] = 1;
  frontier.push(start);
  found.push(start);
  while (!frontier.empty()) {
    Scored current = frontier.top();
    frontier.pop();
    if (found.size() >= ef && better(found.top(), current)) break;
    for (std::uint32_t nb : g.neighbors[current.node]) {
      if (nb >= live || visited[nb]) continue;
      visited[nb] = 1;
      Scored cand{dot(query, vector(nb)), nb};
      if (found.size() < ef || better(cand, found.top())) {
        frontier.push(cand);
        found.push(cand);
        if (found.size() > ef) found.pop();
      }
    }
  }
  std::vector<Scored> out;
  while (!found.empty()) {
    out.push_back(found.top());
    found.pop();
  }
  std::reverse(out.begin(), out.end());
  if (out.size() > k) out.resize(k);
  return out;
}

inline void LevelIndex::build_graph(const GraphParams& params) {
  if (params.max_degree == 0 || params.ef_construction == 0 || params.ef_search == 0)
    fail(ErrorCode::InvalidConfig, "graph parameters must be positive");
  const std::size_t n = ids_.size();

  // Nodes are renumbered into a seeded insertion order so that the graph
  // only depends on (entries, params). The permutation is applied to the
  // stored entries, which keeps search results unchanged.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(params.seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  std::vector<ChunkId> ids(n);
  std::vector<float> data(n * dimension_);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = ids_[perm[i]];
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(perm[i] * dimension_), dimension_,
                data.begin() + static_cast<std::ptrdiff_t>(i * dimension_));
  }
  ids_ = std::move(ids);
  data_ = std::move(data);

  graph_.emplace();
  graph_->params = params;
  graph_->entry = 0;
  auto& adj = graph_->neighbors;
  adj.assign(n, {});
  const std::size_t cap = 2 * params.max_degree;

  auto prune = [&](std::uint32_t node) {
    auto& list = adj[node];
    if (list.size() <= cap) return;
    std::vector<Scored> scored;
    for (auto nb : list) scored.push_back({dot(vector(node), vector(nb)), nb});
    std::sort(scored.begin(), scored.end(), [this](const Scored& a, const Scored& b) { return better(a, b); });
    list.clear();
    for (std::size_t i = 0; i < cap; ++i) list.push_back(scored[i].node);
  };

  for (std::size_t i = 1; i < n; ++i) {
    auto nearest = beam(vector(i), params.ef_construction, params.max_degree, i);
    for (const auto& s : nearest) {
      adj[i].push_back(s.node);
      adj[s.node].push_back(static_cast<std::uint32_t>(i));
      prune(s.node);
    }
  }
}

// ---------------------------------------------------------------------------
// Snapshot format, little endian:
//   8 bytes  magic "HRRVIDX\0"
//   u32      format version
//   u8       level
//   u32      dimension
//   u64      entry count
//   per entry: u32 id length, id bytes, dimension x f32

inline constexpr char kIndexMagic[8] = {'H', 'R', 'R', 'V', 'I', 'D', 'X', '\0'};
inline constexpr std::uint32_t kIndexFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  os.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) fail(ErrorCode::Format, "truncated index snapshot");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  return static_cast<T>(u);
}

}  // namespace detail

inline void LevelIndex::save(std::ostream& os) const {
  // Entries are written in id order so the snapshot is independent of any
  // graph renumbering.
  std::vector<std::size_t> order(ids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });

  os.write(kIndexMagic, sizeof(kIndexMagic));
  detail::put_le<std::uint32_t>(os, kIndexFormatVersion);
  detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(level_));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(dimension_));
  detail::put_le<std::uint64_t>(os, ids_.size());
  for (std::size_t i : order) {
    const auto& id = ids_[i].str();
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(id.size()));
    os.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float v : vector(i)) detail::put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v));
  }
  if (!os) fail(ErrorCode::Io, "failed writing index snapshot");
}

inline LevelIndex LevelIndex::load(std::istream& is) {
  char magic[sizeof(kIndexMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0)
    fail(ErrorCode::Format, "not an index snapshot");
  if (detail::get_le<std::uint32_t>(is) != kIndexFormatVersion)
    fail(ErrorCode::Format, "unsupported index snapshot version");
  auto level_raw = detail::get_le<std::uint8_t>(is);
  if (level_raw > static_cast<std::uint8_t>(Level::Fine)) fail(ErrorCode::Format, "bad level in snapshot");
  auto dim = detail::get_le<std::uint32_t>(is);
  auto count = detail::get_le<std::uint64_t>(is);
  LevelIndex index(static_cast<Level>(level_raw), dim);
  for (std::uint64_t e = 0; e < count; ++e) {
    auto len = detail::get_le<std::uint32_t>(is);
    std::string id(len, '\0');
    if (!is.read(id.data(), len)) fail(ErrorCode::Format, "truncated index snapshot");
    std::vector<float> values(dim);
    for (auto& v : values) v = std::bit_cast<float>(detail::get_le<std::uint32_t>(is));
    index.add(ChunkId(std::move(id)), EmbeddingVector::from_unit(std::move(values), 1e-4));
  }
  return index;
}

/// Embeds every chunk of `level` and stores it exactly once.
inline LevelIndex build_index(const Corpus& corpus, Level level, const EmbeddingProvider& provider,
                              std::size_t batch_size = kDefaultEmbedBatch) {
  auto nodes = corpus.level_chunks(level);
  if (nodes.empty()) {
    fail(ErrorCode::InvalidCorpus, "corpus has no " + std::string(to_string(level)) + " chunks");
  }
  std::vector<std::string_view> texts;
  texts.reserve(nodes.size());
  for (const auto* node : nodes) texts.push_back(corpus.text(*node));
  auto vectors = embed_batch(provider, texts, batch_size);
  LevelIndex index(level, provider.dimension());
  for (std::size_t i = 0; i < nodes.size(); ++i) index.add(nodes[i]->id, vectors[i]);
  return index;
}

/// The indices a retriever may consult, keyed by level.
class IndexSet {
 public:
  void put(LevelIndex index) {
    Level level = index.level();
    indices_.insert_or_assign(level, std::move(index));
  }
  bool has(Level level) const { return indices_.count(level) > 0; }
  const LevelIndex& require(Level level) const {
    auto it = indices_.find(level);
    if (it == indices_.end()) fail(ErrorCode::MissingIndex, std::string(to_string(level)) + " index not built");
    return it->second;
  }
  LevelIndex& mutable_index(Level level) {
    auto it = indices_.find(level);
    if (it == indices_.end()) fail(ErrorCode::MissingIndex, std::string(to_string(level)) + " index not built");
    return it->second;
  }
  const std::map<Level, LevelIndex>& all() const noexcept { return indices_; }

 private:
  std::map<Level, LevelIndex> indices_;
};

}  // namespace hrr
