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

// hrr: command-line front end.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage or configuration
// error, 3 I/O error, 4 remote provider failure, 5 data or validation error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrr/hrr.hpp"

namespace {

int exit_code(hrr::ErrorCode code) {
  using hrr::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidRequest:
      return 2;
    case ErrorCode::Io:
      return 3;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::InvalidResponse:
      return 4;
    default:
      return 5;
  }
}

struct Common {
  std::string config_path;
  std::string corpus_dir;
  std::string index_dir;

  hrr::EngineConfig load() const {
    hrr::EngineConfig c = config_path.empty() ? hrr::EngineConfig{} : hrr::load_config(config_path);
    if (!corpus_dir.empty()) c.paths.corpus_dir = corpus_dir;
    if (!index_dir.empty()) c.paths.index_dir = index_dir;
    return c;
  }
};

struct RetrievalFlags {
  std::optional<std::size_t> k;
  std::optional<std::size_t> rerank_k;

  hrr::RetrieverConfig apply(hrr::RetrieverConfig rc) const {
    if (k) rc.similarity_top_k = *k;
    if (rerank_k) rc.rerank_top_k = *rerank_k;
    return rc;
  }
};

hrr::Strategy strategy_or_fail(const std::string& name) {
  auto s = hrr::parse_strategy(name);
  if (!s) hrr::fail(hrr::ErrorCode::InvalidConfig, "unknown strategy '" + name + "'");
  return *s;
}

void print_result(const hrr::RetrievalResult& r, bool trace) {
  std::printf("%-4s %-10s %s\n", "rank", "score", "parent");
  for (std::size_t i = 0; i < r.parents.size(); ++i) {
    const auto& p = r.parents[i];
    std::printf("%-4zu %-10s %s\n", i + 1, p.score ? hrr::format_fixed6(*p.score).c_str() : "-",
                p.chunk_id.str().c_str());
  }
  if (r.rerank_fallback) std::printf("(reranker unavailable; candidates kept in retrieval order)\n");
  if (!trace) return;
  for (const auto& stage : r.trace) {
    std::printf("\n[%s] %zu\n", stage.name.c_str(), stage.entries.size());
    for (const auto& e : stage.entries) {
      std::printf("  %-10s %s", e.score ? hrr::format_fixed6(*e.score).c_str() : "-", e.chunk_id.str().c_str());
      if (e.origin) std::printf("  <- %s", e.origin->str().c_str());
      std::printf("\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical retrieval with intermediate reranking"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config_path, "JSON config file");
  app.add_option("--corpus-dir", common.corpus_dir, "Directory of source documents");
  app.add_option("--index-dir", common.index_dir, "Directory holding the built index");

  auto* ingest = app.add_subcommand("ingest", "Chunk and index the corpus directory");
  unsigned ingest_threads = 1;
  ingest->add_option("--threads", ingest_threads, "Chunking threads")->check(CLI::Range(1u, 256u));

  auto* query = app.add_subcommand("query", "Retrieve parent chunks for one query");
  std::string query_text;
  std::string strategy_name;
  RetrievalFlags query_flags;
  bool trace = false;
  std::string query_format = "table";
  query->add_option("text", query_text, "Query text")->required();
  query->add_option("--strategy", strategy_name, "hrr, base, c2p or s2p");
  query->add_option("--k", query_flags.k, "Similarity top-k per searched level");
  query->add_option("--rerank-k", query_flags.rerank_k, "Chunks kept after reranking");
  query->add_flag("--trace", trace, "Show every pipeline stage");
  query->add_option("--format", query_format, "table or machine")->check(CLI::IsMember({"table", "machine"}));

  auto* eval = app.add_subcommand("eval", "Hit Rate and MRR over a labeled query set");
  std::string queries_path;
  std::vector<std::string> eval_strategies;
  RetrievalFlags eval_flags;
  std::string eval_format = "table";
  eval->add_option("--queries", queries_path, "Query set (JSONL)");
  eval->add_option("--strategies", eval_strategies, "Strategies to compare")->delimiter(',');
  eval->add_option("--k", eval_flags.k, "Similarity top-k per searched level");
  eval->add_option("--rerank-k", eval_flags.rerank_k, "Chunks kept after reranking");
  eval->add_option("--format", eval_format, "table or machine")->check(CLI::IsMember({"table", "machine"}));

  auto* validate = app.add_subcommand("validate", "Check hierarchy invariants and the query set");
  std::string validate_queries;
  validate->add_option("--queries", validate_queries, "Query set to check as well");

  auto* inspect = app.add_subcommand("inspect", "Show corpus statistics or one chunk");
  std::string chunk_id;
  inspect->add_option("chunk", chunk_id, "Chunk id");

  auto* synth = app.add_subcommand("synth", "Write a synthetic needle corpus and query set");
  hrr::CorpusSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", spec.seed);
  synth->add_option("--docs", spec.n_docs);
  synth->add_option("--tokens", spec.tokens_per_doc, "Minimum tokens per document");
  synth->add_option("--needles", spec.n_needles);
  synth->add_option("--density", spec.distractor_density);
  synth->add_option("--dimension", spec.embedding_dimension, "Embedding dimension needle terms must not collide at");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      auto corpus = hrr::generate(spec);
      hrr::write_synthetic(corpus, synth_out);
      std::printf("wrote %zu documents and %zu queries to %s\n", corpus.documents.size(), corpus.queries.size(),
                  synth_out.c_str());
      return 0;
    }

    hrr::EngineConfig config = common.load();

    if (*ingest) {
      hrr::write_summary(std::cout, hrr::ingest(config, ingest_threads));
      return 0;
    }

    auto ws = hrr::Workspace::load(config);

    if (*query) {
      auto rc = query_flags.apply(config.retriever);
      if (!strategy_name.empty()) rc.strategy = strategy_or_fail(strategy_name);
      auto result = ws.query(query_text, rc);
      if (query_format == "machine") {
        std::cout << hrr::to_json(result, trace).dump() << '\n';
      } else {
        print_result(result, trace);
      }
      return 0;
    }

    if (*eval) {
      auto queries = ws.load_queries(queries_path.empty() ? config.paths.query_set : queries_path);
      std::vector<hrr::Strategy> strategies = config.eval.strategies;
      if (!eval_strategies.empty()) {
        strategies.clear();
        for (const auto& n : eval_strategies) strategies.push_back(strategy_or_fail(n));
      }
      auto rows = ws.evaluate(queries, strategies, eval_flags.apply(config.retriever));
      if (eval_format == "machine") {
        hrr::write_machine(std::cout, rows);
      } else {
        hrr::write_table(std::cout, rows);
      }
      return 0;
    }

    if (*validate) {
      auto problems = hrr::describe_violations(ws.corpus());
      std::string qpath = validate_queries;
      if (qpath.empty() && std::filesystem::exists(config.paths.query_set)) qpath = config.paths.query_set;
      if (!qpath.empty()) {
        std::ifstream is(qpath, std::ios::binary);
        if (!is) hrr::fail(hrr::ErrorCode::Io, "cannot read query set " + qpath);
        auto queries = hrr::read_query_set(is, ws.corpus());
        for (auto& e : hrr::query_set_errors(ws.corpus(), queries)) problems.push_back(e);
      }
      for (const auto& p : problems) std::cout << p << '\n';
      std::cout << (problems.empty() ? "ok" : std::to_string(problems.size()) + " problems") << '\n';
      return problems.empty() ? 0 : 5;
    }

    if (*inspect) {
      if (!chunk_id.empty()) {
        std::cout << hrr::inspect_chunk(ws.corpus(), hrr::ChunkId(chunk_id)).dump(2) << '\n';
        return 0;
      }
      hrr::IngestSummary s{ws.corpus().documents().size(), hrr::chunking_stats(ws.corpus()),
                           hrr::indexed_levels(ws.corpus())};
      hrr::write_summary(std::cout, s);
      return 0;
    }
  } catch (const hrr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
