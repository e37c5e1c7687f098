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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
// Pinned tolerances: metric agreement 1e-12, toy scores 1e-6, graph
// recall@10 >= 0.95, synthetic MRR gap >= 0.10, runtimes 10 s and 60 s.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hrr/hrr.hpp"
#include "stub_server.hpp"
#include "support.hpp"
#include "toy.hpp"

namespace {

using hrr::ChunkId;
using hrr::Level;
using hrr::Strategy;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failures for one criterion; the first few are printed.
struct Check {
  std::size_t failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

int failed_criteria = 0;

void report(int n, const char* title, const Check& c, const std::string& detail) {
  const bool ok = c.failures == 0;
  if (!ok) ++failed_criteria;
  std::printf("[%s] %d %s: %s", ok ? "PASS" : "FAIL", n, title, detail.c_str());
  if (!ok) std::printf(" | %zu failures, first: %s", c.failures, c.first.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Hierarchy invariants on fuzzed documents.

std::string fuzz_document(std::mt19937_64& rng, std::size_t target) {
  static const char* extras[] = {"Dr. Smith agreed.", "\"Is it?\" she asked.", "Costs rose 4.5% (again).",
                                 "Wait...", "See e.g. the list.", "Done!\n\n"};
  std::string doc;
  hrr::SimpleTokenizer tok;
  std::size_t have = 0;
  while (have + 2 <= target) {
    std::size_t left = target - have;
    std::string piece;
    switch (rng() % 10) {
      case 0:
        piece = extras[rng() % 6];
        break;
      case 1: {
        // Run-on text with no terminator, long enough to need a forced split.
        std::size_t n = std::min<std::size_t>(left, 300 + rng() % 500);
        piece = "Run";
        for (std::size_t i = 1; i < n; ++i) piece += " on";
        break;
      }
      default:
        piece = hrr_test::sentence_of(std::min<std::size_t>(left, 2 + rng() % 40), rng);
    }
    std::size_t n = tok.count_tokens(piece);
    if (n > left) continue;
    doc += piece;
    doc += (rng() % 5 == 0) ? "\n" : " ";
    have += n;
  }
  return doc;
}

void criterion_hierarchy() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::map<hrr::DocumentId, std::string> docs;
  std::size_t total_tokens = 0;
  for (int i = 0; i < 100; ++i) {
    std::size_t target = 10 + rng() % 9991;
    docs.emplace(fmt("doc_%03d", i), fuzz_document(rng, target));
  }
  hrr::SimpleTokenizer tok;
  hrr::ChunkingConfig cfg;
  cfg.build_fine_level = true;
  hrr::Corpus corpus = hrr::build_corpus(docs, cfg, tok, 4);

  Check c;
  auto violations = hrr::validate_corpus(corpus);
  c.expect(violations.empty(), violations.empty() ? "" : violations.front().detail);

  const std::map<Level, std::size_t> budget{{Level::Parent, cfg.parent_size},
                                            {Level::Intermediate, cfg.intermediate_size},
                                            {Level::Fine, cfg.fine_size},
                                            {Level::Sentence, cfg.max_sentence_tokens}};
  for (Level level : hrr::kAllLevels) {
    for (const auto* n : corpus.level_chunks(level)) {
      c.expect(n->token_count <= budget.at(level), n->id.str() + " over budget");
      c.expect(tok.count_tokens(corpus.text(*n)) == n->token_count, n->id.str() + " token count disagrees");
    }
  }
  // Reassembly: parents rebuild the document; each tier rebuilds its container.
  std::map<hrr::DocumentId, std::string> rebuilt;
  for (const auto* p : corpus.level_chunks(Level::Parent)) {
    rebuilt[p->doc_id] += corpus.text(*p);
    for (Level child_level : {Level::Intermediate, Level::Fine}) {
      std::string joined;
      for (const auto& child : corpus.children(p->id)) {
        if (corpus.at(child).level == child_level) joined += corpus.text(child);
      }
      if (child_level == Level::Intermediate) c.expect(joined == corpus.text(*p), p->id.str() + " intermediates");
    }
  }
  for (const auto* i : corpus.level_chunks(Level::Intermediate)) {
    std::string joined, fine;
    for (const auto& child : corpus.children(i->id)) {
      const auto& node = corpus.at(child);
      (node.level == Level::Sentence ? joined : fine) += corpus.text(node);
    }
    c.expect(joined == corpus.text(*i), i->id.str() + " sentences");
    if (!fine.empty()) c.expect(fine == corpus.text(*i), i->id.str() + " fine chunks");
  }
  for (const auto& [id, text] : docs) {
    c.expect(rebuilt[id] == text, id + " reassembly");
    total_tokens += tok.count_tokens(text);
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, fmt("took %.2f s", secs));
  report(1, "hierarchy invariants", c,
         fmt("100 docs, %zu tokens, %zu/%zu/%zu/%zu chunks, %.2f s", total_tokens, corpus.count(Level::Parent),
             corpus.count(Level::Intermediate), corpus.count(Level::Sentence), corpus.count(Level::Fine), secs));
}

// ---------------------------------------------------------------------------
// 2. Exact search against a longhand full scan; graph recall.

hrr::EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0);
  v[rng() % dim] += 0.01f;  // never all zero
  return hrr::EmbeddingVector::normalize(std::move(v));
}

ChunkId index_id(std::size_t i) { return ChunkId(fmt("d%02zu#p%04zu.i0000.s0000", i % 7, i)); }

std::vector<hrr::SearchHit> full_scan(const hrr::LevelIndex& index, const hrr::EmbeddingVector& q, std::size_t k) {
  std::vector<hrr::SearchHit> all;
  for (std::size_t i = 0; i < index.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < index.dimension(); ++j)
      s += static_cast<double>(index.vector(i)[j]) * static_cast<double>(q.values()[j]);
    all.push_back({index.id(i), s});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.chunk_id < b.chunk_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

void criterion_oracle() {
  std::mt19937_64 rng(77);
  Check c;
  std::size_t ties = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 400, dim = 2 + rng() % 63;
    hrr::LevelIndex index(Level::Sentence, dim);
    std::vector<hrr::EmbeddingVector> pool;
    for (std::size_t i = 0; i < n; ++i) {
      // Repeat earlier vectors now and then so score ties get exercised.
      if (!pool.empty() && rng() % 4 == 0) {
        pool.push_back(pool[rng() % pool.size()]);
        ++ties;
      } else {
        pool.push_back(random_unit(rng, dim));
      }
      index.add(index_id(i), pool.back());
    }
    auto q = rng() % 5 == 0 ? pool[rng() % pool.size()] : random_unit(rng, dim);
    const std::size_t k = 1 + rng() % (n + 5);
    c.expect(index.search_exact(q, k) == full_scan(index, q, k), fmt("trial %d (n=%zu d=%zu k=%zu)", t, n, dim, k));
  }

  std::size_t found = 0, total = 0;
  for (int round = 0; round < 5; ++round) {
    hrr::LevelIndex index(Level::Sentence, 48);
    for (std::size_t i = 0; i < 1000; ++i) index.add(index_id(i), random_unit(rng, 48));
    auto exact = index;
    hrr::GraphParams gp;
    gp.seed = 100 + round;
    index.build_graph(gp);
    for (int qn = 0; qn < 200; ++qn) {
      auto q = random_unit(rng, 48);
      auto truth = full_scan(exact, q, 10);
      auto approx = index.search(q, 10);
      for (const auto& h : truth) {
        ++total;
        for (const auto& a : approx) found += a.chunk_id == h.chunk_id;
      }
    }
  }
  const double recall = static_cast<double>(found) / static_cast<double>(total);
  c.expect(recall >= 0.95, fmt("graph recall %.4f", recall));
  report(2, "oracle equivalence", c,
         fmt("1000 exact trials (%zu duplicated vectors), graph recall@10 %.4f on 5x1000 entries", ties, recall));
}

// ---------------------------------------------------------------------------
// 3. Metrics against a reference recomputation.

void criterion_metrics() {
  Check c;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 1 + rng() % 200;
    std::vector<hrr::EvalRecord> recs(n);
    long double hits = 0, rr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t rank = rng() % 12;  // 0 = miss
      if (rank == 0) continue;
      recs[i].hit = true;
      recs[i].first_rank = rank;
      hits += 1;
      rr += 1.0L / static_cast<long double>(rank);
    }
    auto s = hrr::summarize(Strategy::Hrr, recs);
    double e = std::max(std::fabs(s.hit_rate - static_cast<double>(hits / n)),
                        std::fabs(s.mrr - static_cast<double>(rr / n)));
    worst = std::max(worst, e);
    c.expect(e <= 1e-12, fmt("list %d off by %g", t, e));
    c.expect(0.0 <= s.mrr && s.mrr <= s.hit_rate && s.hit_rate <= 1.0, fmt("list %d bounds", t));
  }
  hrr_test::Toy toy;
  hrr::LabeledQuery gold{"q", ChunkId("a#p0000"), std::nullopt};
  auto result = [](std::vector<const char*> ids) {
    hrr::RetrievalResult r;
    for (auto id : ids) r.parents.push_back({ChunkId(id), 1.0, {}});
    return r;
  };
  std::vector<hrr::EvalRecord> hand{hrr::score_query(toy.corpus, result({"a#p0000"}), gold),
                                    hrr::score_query(toy.corpus, result({"b#p0000", "a#p0000"}), gold),
                                    hrr::score_query(toy.corpus, result({"c#p0000"}), gold)};
  auto s = hrr::summarize(Strategy::Hrr, hand);
  c.expect(s.hit_rate == 2.0 / 3.0 && s.mrr == 0.5, fmt("hand case HR %.17g MRR %.17g", s.hit_rate, s.mrr));
  report(3, "metric correctness", c, fmt("1000 random lists, max deviation %.3g; ranks [1,2,miss] -> HR %.6f MRR %.6f",
                                         worst, s.hit_rate, s.mrr));
}

// ---------------------------------------------------------------------------
// 4. Toy pipeline, every stage against hand-computed values.

void criterion_toy() {
  hrr_test::Toy toy;
  Check c;
  hrr::RetrieverConfig rc;
  rc.similarity_top_k = 2;
  rc.rerank_top_k = 5;
  struct Want {
    std::vector<std::string> ids;
    std::vector<double> scores;
  };
  auto check_stage = [&](const hrr::RetrievalResult& r, const std::string& name, const Want& w) {
    const auto& st = r.stage(name);
    std::vector<std::string> got;
    for (const auto& e : st.entries) got.push_back(e.chunk_id.str());
    c.expect(got == w.ids, r.query + " / " + name + " ids");
    if (w.scores.empty() || st.entries.size() != w.scores.size()) return;
    for (std::size_t i = 0; i < w.scores.size(); ++i)
      c.expect(std::fabs(st.entries[i].score.value_or(NAN) - w.scores[i]) <= 1e-6, r.query + " / " + name + " score");
  };
  const double s12 = 3 / std::sqrt(12.0), s24 = 3 / std::sqrt(24.0);

  rc.strategy = Strategy::Hrr;
  auto r = hrr::retrieve("solar subsidy details", toy.context(), rc);
  std::vector<std::string> names;
  for (const auto& st : r.trace) names.push_back(st.name);
  c.expect(names == std::vector<std::string>{"sentence_hits", "intermediate_hits", "sentence_to_intermediate", "pool",
                                             "reranked", "top_k", "parents"},
           "stage sequence");
  check_stage(r, "sentence_hits", {{"a#p0000.i0000.s0000", "c#p0000.i0001.s0001"}, {s12, s12}});
  check_stage(r, "intermediate_hits", {{"b#p0000.i0000", "a#p0000.i0000"}, {5.0 / 6.0, s24}});
  check_stage(r, "sentence_to_intermediate", {{"a#p0000.i0000", "c#p0000.i0001"}, {s12, s12}});
  check_stage(r, "pool", {{"a#p0000.i0000", "c#p0000.i0001", "b#p0000.i0000"}, {s12, s12, 5.0 / 6.0}});
  check_stage(r, "reranked", {{"b#p0000.i0000", "a#p0000.i0000", "c#p0000.i0001"}, {3 / std::sqrt(18.0), s24, s24}});
  check_stage(r, "top_k", {{"b#p0000.i0000", "a#p0000.i0000", "c#p0000.i0001"}, {}});
  check_stage(r, "parents", {{"b#p0000", "a#p0000", "c#p0000"}, {}});

  auto dedup = hrr::retrieve("wind tax", toy.context(), rc);
  check_stage(dedup, "pool", {{"a#p0000.i0000", "a#p0000.i0001"}, {}});
  check_stage(dedup, "parents", {{"a#p0000"}, {}});

  rc.strategy = Strategy::Base;
  check_stage(hrr::retrieve("solar subsidy details", toy.context(), rc), "parents", {{"b#p0000", "c#p0000"}, {}});
  rc.strategy = Strategy::S2P;
  check_stage(hrr::retrieve("solar subsidy details", toy.context(), rc), "parents", {{"c#p0000", "a#p0000"}, {}});

  // Unique parents, at most rerank_top_k, for every strategy and many queries.
  for (Strategy s : hrr::kAllStrategies) {
    rc.strategy = s;
    for (const char* q : {"solar", "details matter", "birds rivers mountains", "cats wind tax loans", "nothing"}) {
      auto res = hrr::retrieve(q, toy.context(), rc);
      std::set<ChunkId> u;
      for (const auto& p : res.parents) u.insert(p.chunk_id);
      c.expect(u.size() == res.parents.size() && res.parents.size() <= 5, std::string(q) + " parent set");
    }
  }
  report(4, "pipeline conformance", c, "toy corpus: 7 HRR stages, dedup, Base/S2P orderings match hand values");
}

// ---------------------------------------------------------------------------
// 5. Synthetic corpus ordering.

std::size_t brute_rank(const hrr::Corpus& corpus, Level level, const std::vector<double>& qv, const ChunkId& gold,
                       std::size_t dim) {
  std::vector<std::pair<double, ChunkId>> all;
  for (const auto* n : corpus.level_chunks(level))
    all.emplace_back(hrr_test::oracle_dot(qv, hrr_test::oracle_embed(std::string(corpus.text(*n)), dim)), n->id);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].second == gold) return i + 1;
  return 0;
}

void criterion_synthetic() {
  const auto t0 = Clock::now();
  Check c;
  hrr::CorpusSpec spec;  // 20 docs, >= 5000 tokens, 30 needles, seed 42
  auto synthetic = hrr::generate(spec);
  hrr::ChunkingConfig chunking;
  chunking.build_fine_level = true;
  hrr::SimpleTokenizer tok;
  hrr::Corpus corpus = hrr::build_corpus(synthetic.documents, chunking, tok);
  hrr::HashedBowEmbedder embedder(spec.embedding_dimension);
  hrr::LexicalOverlapScorer reranker;
  hrr::IndexSet indices;
  for (Level level : hrr::kAllLevels) indices.put(hrr::build_index(corpus, level, embedder));
  auto queries = hrr::resolve_queries(synthetic, corpus);
  c.expect(queries.size() >= 30 && synthetic.documents.size() >= 20, "corpus size");

  // Gold ranks at every level, by brute-force cosine and by the index.
  double sum_rank[3] = {0, 0, 0};
  const Level levels[3] = {Level::Sentence, Level::Intermediate, Level::Parent};
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& sq = synthetic.queries[qi];
    auto qv = hrr_test::oracle_embed(sq.query, spec.embedding_dimension);
    const hrr::ChunkNode* gold_sentence = nullptr;
    for (const auto* n : corpus.level_chunks(Level::Sentence))
      if (n->doc_id == sq.gold_doc && n->span.contains(sq.gold_span)) gold_sentence = n;
    c.expect(gold_sentence != nullptr, "gold sentence located");
    if (gold_sentence == nullptr) continue;
    const ChunkId gold[3] = {gold_sentence->id, *gold_sentence->parent_id, queries[qi].gold_parent};
    c.expect(hrr::resolve_parent(corpus, gold[1], Level::Parent) == gold[2], "gold parent consistent");
    auto lib_q = embedder.embed_text(sq.query);
    for (int l = 0; l < 3; ++l) {
      std::size_t brute = brute_rank(corpus, levels[l], qv, gold[l], spec.embedding_dimension);
      const auto& index = indices.require(levels[l]);
      auto hits = index.search_exact(lib_q, index.size());
      std::size_t lib = 0;
      for (std::size_t i = 0; i < hits.size(); ++i)
        if (hits[i].chunk_id == gold[l]) lib = i + 1;
      c.expect(brute == lib, fmt("query %zu level %d: brute rank %zu, index rank %zu", qi, l, brute, lib));
      sum_rank[l] += static_cast<double>(brute);
    }
    c.expect(brute_rank(corpus, Level::Sentence, qv, gold[0], spec.embedding_dimension) == 1,
             fmt("query %zu needle sentence not rank 1", qi));
  }

  auto run = [&](double lambda) {
    hrr::RetrievalContext ctx{corpus, indices, embedder, reranker, {hrr::RerankFallback::Error, lambda}};
    std::map<Strategy, hrr::EvalSummary> by;
    for (const auto& s : hrr::compare(ctx, queries, hrr::kAllStrategies, hrr::RetrieverConfig{})) by[s.strategy] = s;
    return by;
  };
  auto plain = run(0.0);
  auto weighted = run(0.5);
  const auto& h = weighted[Strategy::Hrr];
  const auto& s2p = weighted[Strategy::S2P];
  const auto& base = weighted[Strategy::Base];
  c.expect(h.mrr >= s2p.mrr, "HRR MRR >= S2P MRR");
  c.expect(s2p.mrr >= base.mrr, "S2P MRR >= Base MRR");
  c.expect(h.hit_rate >= base.hit_rate, "HRR HR >= Base HR");
  c.expect(h.mrr - base.mrr >= 0.10, "HRR MRR - Base MRR >= 0.10");
  const double secs = seconds_since(t0);
  c.expect(secs < 60.0, fmt("took %.2f s", secs));
  const double nq = static_cast<double>(queries.size());
  report(5, "synthetic ordering", c,
         fmt("lambda=0.5 MRR hrr %.6f s2p %.6f c2p %.6f base %.6f, HR hrr %.6f base %.6f | lambda=0 MRR hrr %.6f s2p "
             "%.6f base %.6f | mean gold rank sentence %.2f intermediate %.2f parent %.2f | %.2f s",
             h.mrr, s2p.mrr, weighted[Strategy::C2P].mrr, base.mrr, h.hit_rate, base.hit_rate,
             plain[Strategy::Hrr].mrr, plain[Strategy::S2P].mrr, plain[Strategy::Base].mrr, sum_rank[0] / nq,
             sum_rank[1] / nq, sum_rank[2] / nq, secs));
}

// ---------------------------------------------------------------------------
// 6. Determinism of ingest + eval.

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)), {});
}

std::string table_for(const hrr::EngineConfig& config) {
  auto ws = hrr::Workspace::load(config);
  auto rows = ws.evaluate(ws.load_queries(config.paths.query_set), config.eval.strategies, config.retriever);
  std::ostringstream os;
  hrr::write_table(os, rows);
  return os.str();
}

void criterion_determinism() {
  Check c;
  hrr_test::TempDir dir("accept_det");
  hrr::CorpusSpec spec;
  spec.n_docs = 8;
  hrr::write_synthetic(hrr::generate(spec), dir.path() / "s");
  std::string tables[2];
  std::size_t bytes = 0;
  for (int run = 0; run < 2; ++run) {
    hrr::EngineConfig config;
    config.paths.corpus_dir = (dir.path() / "s" / "docs").string();
    config.paths.query_set = (dir.path() / "s" / "queries.jsonl").string();
    config.paths.index_dir = (dir.path() / fmt("idx%d", run)).string();
    hrr::ingest(config, run == 0 ? 1 : 4);
    tables[run] = table_for(config);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir.path() / "idx0")) {
    auto name = entry.path().filename();
    auto a = slurp(entry.path()), b = slurp(dir.path() / "idx1" / name);
    c.expect(!a.empty() && a == b, name.string() + " differs");
    bytes += a.size();
  }
  c.expect(tables[0] == tables[1], "eval tables differ");
  report(6, "determinism", c, fmt("two ingest+eval runs (1 and 4 threads): %zu snapshot bytes and tables identical", bytes));
}

// ---------------------------------------------------------------------------
// 7. Remote providers against an in-process stub.

template <typename F>
std::optional<hrr::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const hrr::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

void criterion_remote() {
  Check c;
  hrr_test::TempDir dir("accept_remote");
  hrr::CorpusSpec spec;
  spec.n_docs = 4;
  spec.tokens_per_doc = 2000;
  spec.n_needles = 8;
  hrr::write_synthetic(hrr::generate(spec), dir.path() / "s");

  hrr_test::StubService embed_stub(spec.embedding_dimension);
  hrr_test::StubService rerank_stub(spec.embedding_dimension);

  hrr::EngineConfig local;
  local.paths.corpus_dir = (dir.path() / "s" / "docs").string();
  local.paths.query_set = (dir.path() / "s" / "queries.jsonl").string();
  local.paths.index_dir = (dir.path() / "local").string();
  hrr::ingest(local);
  const std::string local_table = table_for(local);

  hrr::EngineConfig remote = local;
  remote.paths.index_dir = (dir.path() / "remote").string();
  remote.embedding.provider = hrr::EmbeddingKind::Remote;
  remote.embedding.remote.base_url = embed_stub.base_url();
  remote.embedding.remote.backoff_ms = 1;
  remote.rerank.provider = hrr::RerankKind::Remote;
  remote.rerank.remote.base_url = rerank_stub.base_url();
  remote.rerank.remote.backoff_ms = 1;
  hrr::ingest(remote);
  const std::string remote_table = table_for(remote);
  c.expect(remote_table == local_table, "remote eval table differs from local");
  c.expect(embed_stub.requests.load() > 0 && rerank_stub.requests.load() > 0, "stub not called");

  // Service starts reporting a different dimension.
  embed_stub.reported_dimension = 512;
  auto mismatch = error_of([&] {
    auto cfg = remote;
    cfg.paths.index_dir = (dir.path() / "remote2").string();
    hrr::ingest(cfg);
  });
  c.expect(mismatch == hrr::ErrorCode::DimensionMismatch, "ingest against wrong dimension");
  auto query_mismatch = error_of([&] { hrr::Workspace::load(remote).query("x", remote.retriever); });
  c.expect(query_mismatch == hrr::ErrorCode::DimensionMismatch, "query against wrong dimension");
  embed_stub.reported_dimension = spec.embedding_dimension;

  // Config asks for a dimension the index was not built with.
  auto wide = remote;
  wide.embedding.dimension = 512;
  c.expect(error_of([&] { hrr::Workspace::load(wide); }) == hrr::ErrorCode::DimensionMismatch, "load with new dimension");

  // Slow reranker: strict mode fails, passthrough keeps retrieval order.
  rerank_stub.delay_ms = 400;
  auto slow = remote;
  slow.rerank.remote.timeout_ms = 100;
  slow.rerank.remote.retries = 1;
  c.expect(error_of([&] { hrr::Workspace::load(slow).query("x", slow.retriever); }) ==
               hrr::ErrorCode::ProviderUnavailable,
           "timeout without fallback");
  slow.rerank.fallback = hrr::RerankFallback::Passthrough;
  bool fell_back = false;
  std::size_t parents = 0;
  try {
    auto r = hrr::Workspace::load(slow).query("x", slow.retriever);
    fell_back = r.rerank_fallback;
    parents = r.parents.size();
  } catch (const hrr::Error& e) {
    c.expect(false, std::string("passthrough threw: ") + e.what());
  }
  c.expect(fell_back && parents > 0, "timeout with passthrough fallback");
  rerank_stub.delay_ms = 0;

  report(7, "remote provider contract", c,
         fmt("stub eval matches local table (%d embed, %d rerank requests); dimension mismatch and timeout paths checked",
             embed_stub.requests.load(), rerank_stub.requests.load()));
}

void guarded(int n, const char* title, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    Check c;
    c.expect(false, std::string("exception: ") + e.what());
    report(n, title, c, "aborted");
  }
}

}  // namespace

int main() {
  guarded(1, "hierarchy invariants", criterion_hierarchy);
  guarded(2, "oracle equivalence", criterion_oracle);
  guarded(3, "metric correctness", criterion_metrics);
  guarded(4, "pipeline conformance", criterion_toy);
  guarded(5, "synthetic ordering", criterion_synthetic);
  guarded(6, "determinism", criterion_determinism);
  guarded(7, "remote provider contract", criterion_remote);
  std::printf("%d of 7 criteria failed\n", failed_criteria);
  return failed_criteria == 0 ? 0 : 1;
}
