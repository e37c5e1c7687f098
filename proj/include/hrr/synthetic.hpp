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

// Seeded synthetic corpora with planted "needle" facts.
//
// Documents are long runs of boilerplate sentences drawn from a shared,
// Zipf-weighted vocabulary (plus a few per-document topic words), so large
// chunks of different documents look alike. Each needle is one sentence
// holding a handful of invented terms that occur nowhere else; its query
// names those terms plus two common boilerplate words.
//
// Under the hashed bag-of-words embedder at `embedding_dimension`, needle
// terms never share a hash bucket with any other word, and the needle
// sentence's remaining words occupy distinct buckets. For a query with
// needle terms N (|N| = 3) and fillers f1, f2, that gives
//   cos(query, needle sentence) = 5 / (sqrt(5) * 3)      ~ 0.745
//   cos(query, any other sentence) <= sqrt(2) / sqrt(5)  ~ 0.632
// so the needle sentence is the unique nearest sentence.

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrr/doc_model.hpp"
#include "hrr/error.hpp"
#include "hrr/eval.hpp"
#include "hrr/hash.hpp"

namespace hrr {

struct CorpusSpec {
  std::uint64_t seed = 42;
  std::size_t n_docs = 20;
  std::size_t tokens_per_doc = 5000;  // lower bound per document
  std::size_t n_needles = 30;
  // Probability that a boilerplate word comes from the shared pool rather
  // than the document's own topic words.
  double distractor_density = 0.8;
  // Needle terms are chosen to avoid hash-bucket collisions at this
  // dimension; 0 skips the check.
  std::size_t embedding_dimension = 384;

  void validate() const {
    if (n_docs == 0) fail(ErrorCode::SpecInfeasible, "n_docs must be positive");
    if (tokens_per_doc < 64) fail(ErrorCode::SpecInfeasible, "tokens_per_doc must be at least 64");
    if (distractor_density < 0.0 || distractor_density > 1.0)
      fail(ErrorCode::SpecInfeasible, "distractor_density must lie in [0, 1]");
  }
};

struct SyntheticQuery {
  std::string query;
  DocumentId gold_doc;
  CharSpan gold_span;  // the needle sentence
  std::vector<std::string> needle_terms;
};

struct SyntheticCorpus {
  std::map<DocumentId, std::string> documents;
  std::vector<SyntheticQuery> queries;
};

namespace synth_detail {

inline constexpr std::array<std::string_view, 128> kSharedWords = {
    "scheme", "policy", "government", "benefit", "support", "program", "national", "state",
    "district", "funding", "provision", "eligible", "citizens", "service", "development", "public",
    "application", "process", "department", "minister", "annual", "budget", "report", "framework",
    "implementation", "guidelines", "objective", "target", "coverage", "access", "community", "rural",
    "urban", "sector", "growth", "investment", "infrastructure", "capacity", "training", "income",
    "household", "welfare", "assistance", "financial", "resources", "initiative", "committee", "authority",
    "agency", "council", "review", "monitoring", "evaluation", "outcome", "impact", "beneficiary",
    "registration", "portal", "online", "document", "verification", "payment", "transfer", "account",
    "bank", "credit", "loan", "interest", "insurance", "health", "education", "employment",
    "skill", "women", "children", "youth", "farmers", "agriculture", "water", "energy",
    "housing", "sanitation", "transport", "digital", "technology", "network", "system", "platform",
    "data", "information", "quality", "standard", "compliance", "regulation", "amendment", "notification",
    "circular", "order", "office", "officer", "level", "period", "year", "month",
    "phase", "stage", "component", "measure", "activity", "procedure", "requirement", "criteria",
    "condition", "priority", "focus", "area", "region", "population", "category", "group",
    "member", "partner", "stakeholder", "private", "central", "local", "total", "overall"};

inline constexpr std::array<std::string_view, 60> kTopicWords = {
    "solar", "wind", "crop", "irrigation", "fisheries", "dairy", "textile", "mining", "tourism", "handloom",
    "forestry", "railway", "highway", "harbour", "aviation", "pharmacy", "hospital", "vaccine", "nutrition", "school",
    "college", "library", "museum", "heritage", "sports", "cinema", "broadcasting", "telecom", "satellite", "software",
    "semiconductor", "battery", "electric", "vehicle", "steel", "cement", "fertilizer", "seed", "horticulture", "livestock",
    "poultry", "rubber", "coffee", "tea", "spice", "cotton", "jute", "sugar", "wheat", "rice",
    "pulses", "millet", "river", "coastal", "mountain", "desert", "island", "forest", "wildlife", "climate"};

inline constexpr std::size_t kTopicWordsPerDoc = 12;
inline constexpr std::size_t kNeedleTerms = 3;
inline constexpr std::size_t kNeedleExtraWords = 4;
inline constexpr std::size_t kFillerCandidates = 20;  // query fillers come from the most frequent shared words

// Portable helpers: std distributions are implementation defined.
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cdf_(n) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sum += 1.0 / static_cast<double>(r + 1);
      cdf_[r] = sum;
    }
    for (auto& c : cdf_) c /= sum;
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    double u = unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

inline std::string capitalize(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 'a' + 'A');
  return word;
}

inline std::string invent_word(std::mt19937_64& rng) {
  static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  std::string word;
  std::size_t syllables = 3 + pick(rng, 2);
  for (std::size_t s = 0; s < syllables; ++s) {
    word.push_back(kConsonants[pick(rng, kConsonants.size())]);
    word.push_back(kVowels[pick(rng, kVowels.size())]);
  }
  word.push_back(kConsonants[pick(rng, kConsonants.size())]);
  return word;
}

struct Sentence {
  std::vector<std::string> words;
  std::size_t tokens() const { return words.size() + 1; }  // trailing period
  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += i == 0 ? capitalize(words[i]) : words[i];
    }
    out.push_back('.');
    return out;
  }
};

}  // namespace synth_detail

/// Pure function of `spec`: identical specs give identical corpora.
inline SyntheticCorpus generate(const CorpusSpec& spec) {
  using namespace synth_detail;
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t dim = spec.embedding_dimension;
  auto bucket = [&](std::string_view w) { return fnv1a64(w) % dim; };

  std::set<std::string> vocabulary(kSharedWords.begin(), kSharedWords.end());
  vocabulary.insert(kTopicWords.begin(), kTopicWords.end());
  std::set<std::size_t> used_buckets;
  if (dim > 0) {
    for (const auto& w : vocabulary) used_buckets.insert(bucket(w));
  }

  // Needle terms: unique invented words in otherwise unused buckets.
  const std::size_t needed = spec.n_needles * kNeedleTerms;
  std::vector<std::string> needle_terms;
  std::size_t attempts = 0;
  while (needle_terms.size() < needed) {
    if (++attempts > 200000) {
      fail(ErrorCode::SpecInfeasible, "cannot find " + std::to_string(needed) +
                                          " collision-free needle terms at dimension " + std::to_string(dim));
    }
    std::string w = invent_word(rng);
    if (vocabulary.count(w) > 0) continue;
    if (dim > 0 && used_buckets.count(bucket(w)) > 0) continue;
    vocabulary.insert(w);
    if (dim > 0) used_buckets.insert(bucket(w));
    needle_terms.push_back(std::move(w));
  }

  ZipfSampler zipf(kSharedWords.size());
  auto filler_sentence = [&](const std::vector<std::string_view>& topic) {
    Sentence s;
    std::size_t len = 8 + pick(rng, 9);
    for (std::size_t i = 0; i < len; ++i) {
      if (topic.empty() || unit(rng) < spec.distractor_density) {
        s.words.emplace_back(kSharedWords[zipf(rng)]);
      } else {
        s.words.emplace_back(topic[pick(rng, topic.size())]);
      }
    }
    return s;
  };

  // Filler sentences for every document.
  std::vector<std::vector<std::string_view>> topics(spec.n_docs);
  std::vector<std::vector<Sentence>> docs(spec.n_docs);
  std::size_t total_sentences = 0;
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    std::vector<std::string_view> pool(kTopicWords.begin(), kTopicWords.end());
    shuffle(pool, rng);
    topics[d].assign(pool.begin(), pool.begin() + kTopicWordsPerDoc);
    std::size_t tokens = 0;
    while (tokens < spec.tokens_per_doc) {
      docs[d].push_back(filler_sentence(topics[d]));
      tokens += docs[d].back().tokens();
    }
    total_sentences += docs[d].size();
  }
  if (spec.n_needles > total_sentences) {
    fail(ErrorCode::SpecInfeasible, std::to_string(spec.n_needles) + " needles but only " +
                                        std::to_string(total_sentences) + " sentences");
  }

  // Needle placement: round-robin over a shuffled document order, distinct
  // sentence slots within a document.
  std::vector<std::size_t> doc_order(spec.n_docs);
  for (std::size_t d = 0; d < spec.n_docs; ++d) doc_order[d] = d;
  shuffle(doc_order, rng);
  std::vector<std::set<std::size_t>> taken(spec.n_docs);
  struct Placement {
    std::size_t doc;
    std::size_t slot;
    std::size_t needle;
    std::vector<std::string> fillers;
  };
  std::vector<Placement> placements;
  for (std::size_t n = 0; n < spec.n_needles; ++n) {
    std::size_t d = doc_order[n % spec.n_docs];
    while (taken[d].size() == docs[d].size()) d = (d + 1) % spec.n_docs;
    std::size_t slot = pick(rng, docs[d].size());
    while (taken[d].count(slot) > 0) slot = (slot + 1) % docs[d].size();
    taken[d].insert(slot);

    // Two distinct frequent shared words for the query, then extra shared
    // words for the sentence body, all in distinct buckets.
    std::set<std::size_t> sentence_buckets;
    std::set<std::string_view> sentence_words;
    auto accept = [&](std::string_view w) {
      if (sentence_words.count(w) > 0) return false;
      if (dim > 0 && sentence_buckets.count(bucket(w)) > 0) return false;
      sentence_words.insert(w);
      if (dim > 0) sentence_buckets.insert(bucket(w));
      return true;
    };
    for (std::size_t t = 0; t < kNeedleTerms; ++t) accept(needle_terms[n * kNeedleTerms + t]);
    std::vector<std::string> fillers;
    while (fillers.size() < 2) {
      auto w = kSharedWords[pick(rng, kFillerCandidates)];
      if (accept(w)) fillers.emplace_back(w);
    }
    Sentence needle;
    for (std::size_t t = 0; t < kNeedleTerms; ++t) needle.words.push_back(needle_terms[n * kNeedleTerms + t]);
    needle.words.insert(needle.words.end(), fillers.begin(), fillers.end());
    while (needle.words.size() < kNeedleTerms + 2 + kNeedleExtraWords) {
      auto w = kSharedWords[pick(rng, kSharedWords.size())];
      if (accept(w)) needle.words.emplace_back(w);
    }
    shuffle(needle.words, rng);
    docs[d][slot] = std::move(needle);
    placements.push_back({d, slot, n, std::move(fillers)});
  }

  // Top documents back up to the token floor after the substitutions.
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    std::size_t tokens = 0;
    for (const auto& s : docs[d]) tokens += s.tokens();
    while (tokens < spec.tokens_per_doc) {
      docs[d].push_back(filler_sentence(topics[d]));
      tokens += docs[d].back().tokens();
    }
  }

  // Render. Sentences are separated by a space, with a paragraph break
  // after every sixth sentence.
  SyntheticCorpus out;
  std::vector<std::vector<CharSpan>> spans(spec.n_docs);
  std::vector<DocumentId> ids(spec.n_docs);
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    char name[32];
    std::snprintf(name, sizeof(name), "doc_%04zu.txt", d);
    ids[d] = name;
    std::string text;
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      if (i > 0) text += (i % 6 == 0) ? "\n\n" : " ";
      std::string rendered = docs[d][i].render();
      spans[d].push_back({text.size(), text.size() + rendered.size()});
      text += rendered;
    }
    text.push_back('\n');
    out.documents.emplace(ids[d], std::move(text));
  }

  for (const auto& p : placements) {
    SyntheticQuery q;
    q.needle_terms.assign(needle_terms.begin() + static_cast<std::ptrdiff_t>(p.needle * kNeedleTerms),
                          needle_terms.begin() + static_cast<std::ptrdiff_t>((p.needle + 1) * kNeedleTerms));
    q.query = capitalize(p.fillers[0]) + " " + p.fillers[1];
    for (const auto& t : q.needle_terms) q.query += " " + t;
    q.query += "?";
    q.gold_doc = ids[p.doc];
    q.gold_span = spans[p.doc][p.slot];
    out.queries.push_back(std::move(q));
  }
  return out;
}

/// Labeled queries with gold parents resolved against a chunked corpus.
inline std::vector<LabeledQuery> resolve_queries(const SyntheticCorpus& synthetic, const Corpus& corpus) {
  std::vector<LabeledQuery> out;
  for (const auto& q : synthetic.queries) {
    out.push_back({q.query, resolve_gold_span(corpus, q.gold_doc, q.gold_span), q.gold_doc});
  }
  return out;
}

/// Writes documents to `dir/docs/` and the query set, in span form, to
/// `dir/queries.jsonl`.
inline void write_synthetic(const SyntheticCorpus& synthetic, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "docs", ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + (dir / "docs").string() + ": " + ec.message());
  for (const auto& [id, text] : synthetic.documents) {
    std::ofstream os(dir / "docs" / id, std::ios::binary);
    os << text;
    if (!os) fail(ErrorCode::Io, "cannot write " + (dir / "docs" / id).string());
  }
  std::ofstream qs(dir / "queries.jsonl", std::ios::binary);
  for (const auto& q : synthetic.queries) {
    nlohmann::json rec{{"query", q.query},
                       {"gold_doc_id", q.gold_doc},
                       {"gold_char_span", {q.gold_span.begin, q.gold_span.end}}};
    qs << rec.dump() << '\n';
  }
  if (!qs) fail(ErrorCode::Io, "cannot write queries.jsonl");
}

}  // namespace hrr
