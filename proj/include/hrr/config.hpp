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

// Engine configuration, read from a JSON file. Every section and key is
// optional; omitted values take the defaults below. Unknown keys and
// wrongly typed values are rejected.

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrr/doc_model.hpp"
#include "hrr/error.hpp"
#include "hrr/remote.hpp"
#include "hrr/rerank.hpp"
#include "hrr/retrievers.hpp"
#include "hrr/vector_index.hpp"

namespace hrr {

enum class EmbeddingKind { HashedBow, Remote };
enum class RerankKind { Lexical, Remote };
enum class IndexKind { Exact, Graph };

struct EmbeddingSettings {
  EmbeddingKind provider = EmbeddingKind::HashedBow;
  std::size_t dimension = 384;
  std::size_t batch_size = 64;
  RemoteSettings remote;
};

struct RerankSettings {
  RerankKind provider = RerankKind::Lexical;
  RerankFallback fallback = RerankFallback::Error;
  double lambda = 0.0;  // weight of the best contained-sentence similarity
  RemoteSettings remote;
};

struct IndexSettings {
  IndexKind kind = IndexKind::Exact;
  GraphParams graph;
};

struct PathSettings {
  std::string corpus_dir = "corpus";
  std::string index_dir = "index";
  std::string query_set = "queries.jsonl";
};

struct EvalSettings {
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  unsigned threads = 1;
};

struct EngineConfig {
  ChunkingConfig chunking;
  EmbeddingSettings embedding;
  RerankSettings rerank;
  RetrieverConfig retriever;
  IndexSettings index;
  PathSettings paths;
  EvalSettings eval;

  /// The fine (sub-intermediate) tier is only built when some configured
  /// strategy needs it.
  bool needs_fine_level() const {
    if (retriever.strategy == Strategy::C2P) return true;
    for (Strategy s : eval.strategies) {
      if (s == Strategy::C2P) return true;
    }
    return false;
  }

  ChunkingConfig effective_chunking() const {
    ChunkingConfig c = chunking;
    c.build_fine_level = needs_fine_level();
    return c;
  }

  void validate() const {
    effective_chunking().validate();
    retriever.validate();
    if (embedding.dimension == 0) fail(ErrorCode::InvalidConfig, "embedding.dimension must be positive");
    if (embedding.batch_size == 0) fail(ErrorCode::InvalidConfig, "embedding.batch_size must be positive");
    if (embedding.provider == EmbeddingKind::Remote) embedding.remote.validate();
    if (rerank.provider == RerankKind::Remote) rerank.remote.validate();
    if (eval.strategies.empty()) fail(ErrorCode::InvalidConfig, "eval.strategies must not be empty");
    if (index.graph.max_degree == 0 || index.graph.ef_construction == 0 || index.graph.ef_search == 0)
      fail(ErrorCode::InvalidConfig, "index.graph parameters must be positive");
  }
};

namespace config_detail {

// Reads one JSON object, tracking which keys were consumed.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::InvalidConfig, label() + " must be an object");
  }

  template <typename T>
  void read(std::string_view key, T& out) {
    consumed_.emplace_back(key);
    auto it = j_.find(std::string(key));
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_integer() || it->template get<long long>() < 0)
          fail(ErrorCode::InvalidConfig, label(key) + " must be a non-negative integer");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) fail(ErrorCode::InvalidConfig, label(key) + " must be an integer");
      }
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::InvalidConfig, label(key) + " has the wrong type");
    }
  }

  template <typename Enum, typename Parse>
  void read_enum(std::string_view key, Enum& out, Parse parse) {
    std::string name;
    bool present = j_.contains(std::string(key));
    read(key, name);
    if (!present) return;
    auto parsed = parse(name);
    if (!parsed) fail(ErrorCode::InvalidConfig, label(key) + ": unknown value '" + name + "'");
    out = *parsed;
  }

  std::optional<Section> child(std::string_view key) {
    consumed_.emplace_back(key);
    auto it = j_.find(std::string(key));
    if (it == j_.end()) return std::nullopt;
    return Section(*it, label(key));
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (std::find(consumed_.begin(), consumed_.end(), item.key()) == consumed_.end())
        fail(ErrorCode::InvalidConfig, "unknown key " + label(item.key()));
    }
  }

 private:
  std::string label(std::string_view key = {}) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const nlohmann::json& j_;
  std::string path_;
  std::vector<std::string> consumed_;
};

inline void read_remote(Section& parent, RemoteSettings& remote) {
  auto s = parent.child("remote");
  if (!s) return;
  s->read("base_url", remote.base_url);
  s->read("timeout_ms", remote.timeout_ms);
  s->read("retries", remote.retries);
  s->read("backoff_ms", remote.backoff_ms);
  s->read("max_in_flight", remote.max_in_flight);
  s->read("api_key_env", remote.api_key_env);
  s->finish();
}

}  // namespace config_detail

/// Parses and validates a config document.
inline EngineConfig parse_config(const nlohmann::json& j) {
  using config_detail::Section;
  EngineConfig c;
  Section root(j, "");

  if (auto s = root.child("chunking")) {
    s->read("parent_size", c.chunking.parent_size);
    s->read("parent_overlap", c.chunking.parent_overlap);
    s->read("intermediate_size", c.chunking.intermediate_size);
    s->read("intermediate_overlap", c.chunking.intermediate_overlap);
    s->read("fine_size", c.chunking.fine_size);
    s->read("max_sentence_tokens", c.chunking.max_sentence_tokens);
    s->read("tokenizer", c.chunking.tokenizer);
    s->finish();
    make_tokenizer(c.chunking.tokenizer);
  }
  if (auto s = root.child("embedding")) {
    s->read_enum("provider", c.embedding.provider, [](std::string_view n) -> std::optional<EmbeddingKind> {
      if (n == "hashed-bow") return EmbeddingKind::HashedBow;
      if (n == "remote") return EmbeddingKind::Remote;
      return std::nullopt;
    });
    s->read("dimension", c.embedding.dimension);
    s->read("batch_size", c.embedding.batch_size);
    config_detail::read_remote(*s, c.embedding.remote);
    s->finish();
  }
  if (auto s = root.child("rerank")) {
    s->read_enum("provider", c.rerank.provider, [](std::string_view n) -> std::optional<RerankKind> {
      if (n == "lexical") return RerankKind::Lexical;
      if (n == "remote") return RerankKind::Remote;
      return std::nullopt;
    });
    s->read_enum("fallback", c.rerank.fallback, parse_rerank_fallback);
    s->read("lambda", c.rerank.lambda);
    config_detail::read_remote(*s, c.rerank.remote);
    s->finish();
  }
  if (auto s = root.child("retriever")) {
    s->read_enum("strategy", c.retriever.strategy, parse_strategy);
    s->read("similarity_top_k", c.retriever.similarity_top_k);
    s->read("rerank_top_k", c.retriever.rerank_top_k);
    s->finish();
  }
  if (auto s = root.child("index")) {
    s->read_enum("kind", c.index.kind, [](std::string_view n) -> std::optional<IndexKind> {
      if (n == "exact") return IndexKind::Exact;
      if (n == "graph") return IndexKind::Graph;
      return std::nullopt;
    });
    s->read("seed", c.index.graph.seed);
    s->read("max_degree", c.index.graph.max_degree);
    s->read("ef_construction", c.index.graph.ef_construction);
    s->read("ef_search", c.index.graph.ef_search);
    s->finish();
  }
  if (auto s = root.child("paths")) {
    s->read("corpus_dir", c.paths.corpus_dir);
    s->read("index_dir", c.paths.index_dir);
    s->read("query_set", c.paths.query_set);
    s->finish();
  }
  if (auto s = root.child("eval")) {
    std::vector<std::string> names;
    bool present = j.at("eval").contains("strategies");
    s->read("strategies", names);
    if (present) {
      c.eval.strategies.clear();
      for (const auto& n : names) {
        auto parsed = parse_strategy(n);
        if (!parsed) fail(ErrorCode::InvalidConfig, "eval.strategies: unknown strategy '" + n + "'");
        c.eval.strategies.push_back(*parsed);
      }
    }
    s->read("threads", c.eval.threads);
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

/// Loads a config file. Relative paths inside it are resolved against the
/// file's directory.
inline EngineConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) fail(ErrorCode::Io, "cannot open config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, file.string() + ": " + e.what());
  }
  EngineConfig c = parse_config(j);
  auto base = file.parent_path();
  for (std::string* p : {&c.paths.corpus_dir, &c.paths.index_dir, &c.paths.query_set}) {
    std::filesystem::path path(*p);
    if (path.is_relative() && !base.empty()) *p = (base / path).lexically_normal().string();
  }
  return c;
}

}  // namespace hrr
