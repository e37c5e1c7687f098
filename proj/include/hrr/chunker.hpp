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

// Three-tier chunking: parent -> intermediate -> sentence.
//
// Sentences are the packing unit. A chunk at any level ends at the last
// sentence boundary that fits its token budget; a sentence that alone exceeds
// the budget is cut at token boundaries and the pieces are flagged as
// hard splits. With zero overlap, sibling spans tile their container exactly
// (whitespace between chunks belongs to the earlier chunk), so
// concatenating parent texts reproduces the document byte for byte.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hrr/doc_model.hpp"
#include "hrr/error.hpp"
#include "hrr/tokenizer.hpp"

namespace hrr {

// Words after which a period does not end a sentence. Matched
// case-sensitively against the run of letters and inner periods that
// precedes the period.
inline constexpr std::array<std::string_view, 40> kAbbreviations = {
    "Mr",   "Mrs",  "Ms",   "Dr",   "Prof", "Sr",   "Jr",  "St",   "Mt",  "Gen",
    "Col",  "Capt", "Sgt",  "Lt",   "Gov",  "Sen",  "Rep", "Rev",  "Hon", "vs",
    "etc",  "e.g",  "i.e",  "cf",   "al",   "Inc",  "Ltd", "Co",   "Corp", "No",
    "Fig",  "Vol",  "approx", "Jan", "Feb", "Aug",  "Sept", "Oct", "Nov", "Dec"};

struct ChunkingStats {
  std::size_t parents = 0;
  std::size_t intermediates = 0;
  std::size_t sentences = 0;
  std::size_t fine = 0;
};

namespace detail {

constexpr bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
constexpr bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}
constexpr bool is_upper_ascii(char c) { return c >= 'A' && c <= 'Z'; }

inline bool is_abbreviation(std::string_view text, std::size_t period) {
  std::size_t start = period;
  while (start > 0) {
    char c = text[start - 1];
    if (is_word_byte(static_cast<unsigned char>(c)) || c == '.') {
      --start;
    } else {
      break;
    }
  }
  auto word = text.substr(start, period - start);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

// Sentence boundaries by rule only, no token limit. Spans are trimmed of
// surrounding whitespace.
inline std::vector<CharSpan> rule_sentences(std::string_view text) {
  std::vector<CharSpan> out;
  const std::size_t n = text.size();
  auto skip_space = [&](std::size_t i) {
    while (i < n && is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
    return i;
  };

  std::size_t i = skip_space(0);
  while (i < n) {
    const std::size_t start = i;
    std::size_t end = std::string_view::npos;
    std::size_t j = i;
    while (j < n) {
      if (!is_terminator(text[j])) {
        ++j;
        continue;
      }
      std::size_t k = j;
      while (k < n && is_terminator(text[k])) ++k;
      const bool single_period = text[j] == '.' && k - j == 1;
      while (k < n && is_closer(text[k])) ++k;
      std::size_t next = skip_space(k);
      if (next == n) {
        end = k;
        break;
      }
      if (next > k && is_upper_ascii(text[next]) && !(single_period && is_abbreviation(text, j))) {
        end = k;
        break;
      }
      j = k;
    }
    if (end == std::string_view::npos) {
      end = n;
      while (end > start && is_space_byte(static_cast<unsigned char>(text[end - 1]))) --end;
    }
    out.push_back({start, end});
    i = skip_space(end);
  }
  return out;
}

// A packing unit: one sentence or a piece of one.
struct Unit {
  std::size_t first_token = 0;  // index into the document's token array
  std::size_t token_count = 0;
  bool forced_end = false;      // ends mid-sentence
};

// Cuts `unit` into consecutive pieces of at most `budget` tokens.
inline void split_unit(const Unit& unit, std::size_t budget, std::vector<Unit>& out) {
  std::size_t offset = 0;
  while (offset < unit.token_count) {
    std::size_t take = std::min(budget, unit.token_count - offset);
    bool last = offset + take == unit.token_count;
    out.push_back({unit.first_token + offset, take, last ? unit.forced_end : true});
    offset += take;
  }
}

// Greedy packing; oversized units are hard-split first.
inline std::vector<std::vector<Unit>> pack(const std::vector<Unit>& units, std::size_t budget) {
  std::vector<std::vector<Unit>> groups;
  std::vector<Unit> current;
  std::size_t current_tokens = 0;
  std::vector<Unit> pieces;
  for (const auto& unit : units) {
    pieces.clear();
    if (unit.token_count > budget) {
      split_unit(unit, budget, pieces);
    } else {
      pieces.push_back(unit);
    }
    for (const auto& piece : pieces) {
      if (!current.empty() && current_tokens + piece.token_count > budget) {
        groups.push_back(std::move(current));
        current.clear();
        current_tokens = 0;
      }
      current.push_back(piece);
      current_tokens += piece.token_count;
    }
  }
  if (!current.empty()) groups.push_back(std::move(current));
  return groups;
}

struct Region {
  CharSpan span;             // byte range owned by the chunk
  std::size_t first_token;   // first token owned
  std::size_t end_token;     // one past last token owned
};

class DocumentChunker {
 public:
  DocumentChunker(const DocumentId& doc_id, std::string_view text, const ChunkingConfig& config,
                  const Tokenizer& tokenizer)
      : doc_id_(doc_id), text_(text), config_(config), tokens_(tokenizer.token_spans(text)) {}

  std::vector<ChunkNode> run(std::size_t max_sentence_tokens) {
    std::vector<Unit> sentences;
    for (const auto& span : rule_sentences(text_)) {
      Unit unit{token_index(span.begin), 0, false};
      unit.token_count = token_index(span.end) - unit.first_token;
      if (unit.token_count == 0) continue;
      if (unit.token_count > max_sentence_tokens) {
        split_unit(unit, max_sentence_tokens, sentences);
      } else {
        sentences.push_back(unit);
      }
    }

    Region doc{{0, text_.size()}, 0, tokens_.size()};
    auto parents = pack(sentences, config_.parent_size - config_.parent_overlap);
    auto regions = tile(doc, parents);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      ChunkId pid = ChunkId::parent(doc_id_, p);
      emit(pid, Level::Parent, std::nullopt, regions[p], doc, p, config_.parent_overlap,
           parents[p].back().forced_end);
      build_intermediates(pid, regions[p], parents[p]);
    }
    return std::move(nodes_);
  }

 private:
  // Index of the first token starting at or after `offset`.
  std::size_t token_index(std::size_t offset) const {
    auto it = std::lower_bound(tokens_.begin(), tokens_.end(), offset,
                               [](const TokenSpan& t, std::size_t off) { return t.begin < off; });
    return static_cast<std::size_t>(it - tokens_.begin());
  }

  // Sibling regions that tile `container`. Each region starts at its first
  // token; the first region also absorbs leading whitespace and the last one
  // trailing whitespace.
  std::vector<Region> tile(const Region& container, const std::vector<std::vector<Unit>>& groups) const {
    std::vector<Region> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      Region r;
      r.first_token = groups[g].front().first_token;
      r.end_token = groups[g].back().first_token + groups[g].back().token_count;
      r.span.begin = g == 0 ? container.span.begin : tokens_[r.first_token].begin;
      r.span.end = g + 1 == groups.size() ? container.span.end
                                          : tokens_[groups[g + 1].front().first_token].begin;
      out.push_back(r);
    }
    return out;
  }

  void emit(const ChunkId& id, Level level, std::optional<ChunkId> parent, const Region& own,
            const Region& container, std::size_t ordinal, std::size_t overlap, bool forced_end) {
    ChunkNode node;
    node.id = id;
    node.level = level;
    node.doc_id = doc_id_;
    node.parent_id = std::move(parent);
    node.span = own.span;
    std::size_t first = own.first_token;
    if (ordinal > 0 && overlap > 0) {
      // Reach back into the previous sibling, never past the container.
      first = std::max(container.first_token, own.first_token > overlap ? own.first_token - overlap : 0);
      node.span.begin = tokens_[first].begin;
    }
    node.token_count = own.end_token - first;
    node.hard_split = forced_end;
    nodes_.push_back(std::move(node));
  }

  void build_intermediates(const ChunkId& pid, const Region& parent, const std::vector<Unit>& units) {
    auto groups = pack(units, config_.intermediate_size - config_.intermediate_overlap);
    auto regions = tile(parent, groups);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      ChunkId iid = pid.child(Level::Intermediate, i);
      emit(iid, Level::Intermediate, pid, regions[i], parent, i, config_.intermediate_overlap,
           groups[i].back().forced_end);

      std::vector<std::vector<Unit>> singles;
      for (const auto& unit : groups[i]) singles.push_back({unit});
      auto sentence_regions = tile(regions[i], singles);
      for (std::size_t s = 0; s < singles.size(); ++s) {
        emit(iid.child(Level::Sentence, s), Level::Sentence, iid, sentence_regions[s], regions[i], s,
             0, singles[s].front().forced_end);
      }

      if (config_.build_fine_level) {
        auto fine = pack(groups[i], config_.fine_size);
        auto fine_regions = tile(regions[i], fine);
        for (std::size_t f = 0; f < fine.size(); ++f) {
          emit(iid.child(Level::Fine, f), Level::Fine, iid, fine_regions[f], regions[i], f, 0,
               fine[f].back().forced_end);
        }
      }
    }
  }

  const DocumentId& doc_id_;
  std::string_view text_;
  const ChunkingConfig& config_;
  std::vector<TokenSpan> tokens_;
  std::vector<ChunkNode> nodes_;
};

}  // namespace detail

/// Sentence spans of `text`, trimmed of surrounding whitespace.
///
/// A sentence ends after a run of `.`, `!` or `?` (plus any closing quotes or
/// brackets) that is followed by whitespace and an ASCII capital letter, or
/// by the end of the text. A single period after a word in kAbbreviations
/// does not end a sentence. Sentences longer than `max_tokens` are cut into
/// consecutive pieces of `max_tokens` tokens.
inline std::vector<CharSpan> split_sentences(std::string_view text, const Tokenizer& tokenizer,
                                             std::size_t max_tokens = 400) {
  std::vector<CharSpan> out;
  for (const auto& span : detail::rule_sentences(text)) {
    auto piece_text = text.substr(span.begin, span.size());
    auto tokens = tokenizer.token_spans(piece_text);
    if (tokens.size() <= max_tokens) {
      if (!tokens.empty()) out.push_back(span);
      continue;
    }
    for (std::size_t t = 0; t < tokens.size(); t += max_tokens) {
      std::size_t last = std::min(t + max_tokens, tokens.size()) - 1;
      out.push_back({span.begin + tokens[t].begin, span.begin + tokens[last].end});
    }
  }
  return out;
}

inline std::vector<CharSpan> split_sentences(std::string_view text) {
  return split_sentences(text, SimpleTokenizer{});
}

/// All chunks of one document, in depth-first order.
inline CorpusFragment chunk_document(const DocumentId& doc_id, std::string text,
                                     const ChunkingConfig& config, const Tokenizer& tokenizer) {
  config.validate();
  if (doc_id.empty()) fail(ErrorCode::InvalidInput, "document id must not be empty");
  if (tokenizer.count_tokens(text) == 0) fail(ErrorCode::EmptyDocument, doc_id);
  CorpusFragment fragment;
  fragment.doc_id = doc_id;
  fragment.chunks = detail::DocumentChunker(doc_id, text, config, tokenizer)
                        .run(config.max_sentence_tokens);
  fragment.text = std::move(text);
  return fragment;
}

/// Chunks every document into one corpus. Documents are independent, so
/// `threads` > 1 chunks them concurrently; the result does not depend on it.
inline Corpus build_corpus(const std::map<DocumentId, std::string>& documents,
                           const ChunkingConfig& config, const Tokenizer& tokenizer,
                           unsigned threads = 1) {
  config.validate();
  std::vector<const std::pair<const DocumentId, std::string>*> items;
  for (const auto& item : documents) items.push_back(&item);
  std::vector<CorpusFragment> fragments(items.size());
  std::vector<std::exception_ptr> errors(items.size());

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < items.size(); i += stride) {
      try {
        fragments[i] = chunk_document(items[i]->first, items[i]->second, config, tokenizer);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(items.size())));
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

  Corpus corpus(config);
  for (auto& fragment : fragments) corpus.add(std::move(fragment));
  return corpus;
}

inline ChunkingStats chunking_stats(const Corpus& corpus) {
  return {corpus.count(Level::Parent), corpus.count(Level::Intermediate),
          corpus.count(Level::Sentence), corpus.count(Level::Fine)};
}

}  // namespace hrr
