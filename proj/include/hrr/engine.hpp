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

// File-backed workflow: ingest a directory of documents into an index
// directory, then load it to query, evaluate, validate or inspect.
//
// Index directory layout:
//   manifest.json        embedding provider, dimension, indexed levels
//   corpus.jsonl         chunk records (see write_corpus)
//   index_<level>.bin    one vector snapshot per level

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrr/chunker.hpp"
#include "hrr/config.hpp"
#include "hrr/doc_model.hpp"
#include "hrr/embedding.hpp"
#include "hrr/error.hpp"
#include "hrr/eval.hpp"
#include "hrr/remote.hpp"
#include "hrr/rerank.hpp"
#include "hrr/retrievers.hpp"
#include "hrr/tokenizer.hpp"
#include "hrr/vector_index.hpp"

namespace hrr {

namespace fs = std::filesystem;

inline std::unique_ptr<EmbeddingProvider> make_embedder(const EngineConfig& config) {
  if (config.embedding.provider == EmbeddingKind::Remote)
    return std::make_unique<RemoteEmbedder>(config.embedding.remote, config.embedding.dimension);
  std::shared_ptr<const Tokenizer> tok = make_tokenizer(config.chunking.tokenizer);
  return std::make_unique<HashedBowEmbedder>(config.embedding.dimension, std::move(tok));
}

inline std::unique_ptr<RerankProvider> make_reranker(const EngineConfig& config) {
  if (config.rerank.provider == RerankKind::Remote) return std::make_unique<RemoteReranker>(config.rerank.remote);
  std::shared_ptr<const Tokenizer> tok = make_tokenizer(config.chunking.tokenizer);
  return std::make_unique<LexicalOverlapScorer>(std::move(tok));
}

inline std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) fail(ErrorCode::Io, "cannot write " + path.string());
}

/// Regular files under `dir`, keyed by path relative to `dir`. Hidden files
/// and directories are skipped.
inline std::map<DocumentId, std::string> read_documents(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "not a directory: " + dir.string());
  std::map<DocumentId, std::string> docs;
  for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
    const auto name = it->path().filename().string();
    if (!name.empty() && name[0] == '.') {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    docs.emplace(fs::relative(it->path(), dir).generic_string(), read_file(it->path()));
  }
  if (docs.empty()) fail(ErrorCode::NoDocuments, "no documents in " + dir.string());
  return docs;
}

inline std::vector<Level> indexed_levels(const Corpus& corpus) {
  std::vector<Level> out;
  for (Level level : kAllLevels) {
    if (corpus.count(level) > 0) out.push_back(level);
  }
  return out;
}

inline IndexSet build_indices(const Corpus& corpus, const EmbeddingProvider& embedder, const EngineConfig& config) {
  IndexSet set;
  for (Level level : indexed_levels(corpus)) {
    auto index = build_index(corpus, level, embedder, config.embedding.batch_size);
    if (config.index.kind == IndexKind::Graph) index.build_graph(config.index.graph);
    set.put(std::move(index));
  }
  return set;
}

inline fs::path index_file(const fs::path& dir, Level level) {
  return dir / ("index_" + std::string(to_string(level)) + ".bin");
}

struct IngestSummary {
  std::size_t documents = 0;
  ChunkingStats stats;
  std::vector<Level> levels;
};

inline void write_summary(std::ostream& os, const IngestSummary& s) {
  os << "documents     " << s.documents << '\n'
     << "parents       " << s.stats.parents << '\n'
     << "intermediates " << s.stats.intermediates << '\n'
     << "sentences     " << s.stats.sentences << '\n';
  if (s.stats.fine > 0) os << "fine          " << s.stats.fine << '\n';
  os << "indexed       ";
  for (std::size_t i = 0; i < s.levels.size(); ++i) os << (i ? "," : "") << to_string(s.levels[i]);
  os << '\n';
}

/// Chunks, embeds and persists everything under config.paths.
inline IngestSummary ingest(const EngineConfig& config, unsigned threads = 1) {
  config.validate();
  auto docs = read_documents(config.paths.corpus_dir);
  auto tokenizer = make_tokenizer(config.chunking.tokenizer);
  Corpus corpus = build_corpus(docs, config.effective_chunking(), *tokenizer, threads);
  auto embedder = make_embedder(config);
  IndexSet indices = build_indices(corpus, *embedder, config);

  const fs::path out(config.paths.index_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + out.string() + ": " + ec.message());

  std::ostringstream corpus_os;
  write_corpus(corpus, corpus_os);
  write_file(out / "corpus.jsonl", corpus_os.str());
  auto levels = nlohmann::json::array();
  for (const auto& [level, index] : indices.all()) {
    std::ofstream os(index_file(out, level), std::ios::binary);
    index.save(os);
    if (!os) fail(ErrorCode::Io, "cannot write " + index_file(out, level).string());
    levels.push_back(to_string(level));
  }
  nlohmann::json manifest{{"format", "hrr-workspace"},
                          {"version", 1},
                          {"embedding", {{"provider", embedder->name()}, {"dimension", embedder->dimension()}}},
                          {"levels", levels}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  return {docs.size(), chunking_stats(corpus), indexed_levels(corpus)};
}

/// A loaded index directory plus the providers needed to query it.
class Workspace {
 public:
  static Workspace load(const EngineConfig& config) {
    config.validate();
    Workspace ws;
    ws.config_ = config;
    const fs::path dir(config.paths.index_dir);
    if (!fs::exists(dir / "manifest.json"))
      fail(ErrorCode::MissingIndex, "no index at " + dir.string() + "; run ingest first");

    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, std::string("bad manifest: ") + e.what());
    }
    ws.embedder_ = make_embedder(config);
    ws.reranker_ = make_reranker(config);
    const auto built_with = manifest.at("embedding").at("provider").get<std::string>();
    const auto built_dim = manifest.at("embedding").at("dimension").get<std::size_t>();
    if (built_with != ws.embedder_->name() || built_dim != ws.embedder_->dimension()) {
      fail(ErrorCode::DimensionMismatch, "index was built with " + built_with + "/" + std::to_string(built_dim) +
                                             ", config uses " + std::string(ws.embedder_->name()) + "/" +
                                             std::to_string(ws.embedder_->dimension()) + "; re-run ingest");
    }

    const fs::path source(config.paths.corpus_dir);
    std::ifstream cs(dir / "corpus.jsonl", std::ios::binary);
    if (!cs) fail(ErrorCode::MissingIndex, "missing " + (dir / "corpus.jsonl").string());
    ws.corpus_ = std::make_unique<Corpus>(
        read_corpus(cs, [&](const DocumentId& id) { return read_file(source / id); }));
    ChunkingConfig stored = ws.corpus_->config();
    ChunkingConfig wanted = config.chunking;
    stored.build_fine_level = wanted.build_fine_level = false;
    if (!(stored == wanted)) fail(ErrorCode::InvalidConfig, "chunking settings changed since ingest; re-run ingest");

    for (const auto& name : manifest.at("levels")) {
      auto level = parse_level(name.get<std::string>());
      if (!level) fail(ErrorCode::Format, "unknown level in manifest");
      std::ifstream is(index_file(dir, *level), std::ios::binary);
      if (!is) fail(ErrorCode::MissingIndex, "missing " + index_file(dir, *level).string());
      auto index = LevelIndex::load(is);
      if (index.dimension() != built_dim) fail(ErrorCode::DimensionMismatch, "snapshot dimension disagrees");
      if (config.index.kind == IndexKind::Graph) index.build_graph(config.index.graph);
      ws.indices_.put(std::move(index));
    }
    return ws;
  }

  const EngineConfig& config() const noexcept { return config_; }
  const Corpus& corpus() const noexcept { return *corpus_; }
  const IndexSet& indices() const noexcept { return indices_; }

  RetrievalContext context() const {
    return {*corpus_, indices_, *embedder_, *reranker_,
            RerankOptions{config_.rerank.fallback, config_.rerank.lambda}};
  }

  RetrievalResult query(std::string_view text, const RetrieverConfig& rc) const {
    return Retriever(context(), rc).retrieve(text);
  }

  std::vector<LabeledQuery> load_queries(const fs::path& file) const {
    std::ifstream is(file, std::ios::binary);
    if (!is) fail(ErrorCode::Io, "cannot read query set " + file.string());
    auto queries = read_query_set(is, *corpus_);
    if (queries.empty()) fail(ErrorCode::EmptyQuerySet, file.string() + " has no queries");
    return queries;
  }

  std::vector<EvalSummary> evaluate(std::span<const LabeledQuery> queries, std::span<const Strategy> strategies,
                                    const RetrieverConfig& rc) const {
    return compare(context(), queries, strategies, rc, config_.eval.threads);
  }

 private:
  Workspace() = default;

  EngineConfig config_;
  std::unique_ptr<Corpus> corpus_;
  IndexSet indices_;
  std::unique_ptr<EmbeddingProvider> embedder_;
  std::unique_ptr<RerankProvider> reranker_;
};

/// Hierarchy violations, one line each. Empty means the corpus is sound.
inline std::vector<std::string> describe_violations(const Corpus& corpus) {
  std::vector<std::string> out;
  for (const auto& v : validate_corpus(corpus)) {
    out.push_back(std::string(to_string(v.kind)) + " " + v.subject + ": " + v.detail);
  }
  return out;
}

/// One chunk with its text and children, as JSON.
inline nlohmann::json inspect_chunk(const Corpus& corpus, const ChunkId& id) {
  const ChunkNode& node = corpus.at(id);
  auto children = nlohmann::json::array();
  for (const auto& child : corpus.children(id)) children.push_back(child.str());
  return {{"id", node.id.str()},
          {"level", to_string(node.level)},
          {"doc_id", node.doc_id},
          {"parent_id", node.parent_id ? nlohmann::json(node.parent_id->str()) : nlohmann::json()},
          {"char_span", {node.span.begin, node.span.end}},
          {"token_count", node.token_count},
          {"hard_split", node.hard_split},
          {"children", children},
          {"text", std::string(corpus.text(node))}};
}

}  // namespace hrr
