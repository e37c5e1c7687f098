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

// Document / chunk hierarchy shared by every other component.
//
// A document is split into parent chunks, each parent into intermediate
// chunks, and each intermediate into sentence chunks. An optional fourth tier
// of fixed-size "fine" chunks hangs off intermediates as well; only the
// child-to-parent baseline consumes it.
//
// Chunk text is never copied: a node stores a byte span into its source
// document and the Corpus resolves text on demand.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hrr/error.hpp"
#include "hrr/hash.hpp"

namespace hrr {

enum class Level : std::uint8_t { Parent, Intermediate, Sentence, Fine };

inline constexpr Level kAllLevels[] = {Level::Parent, Level::Intermediate, Level::Sentence,
                                       Level::Fine};

constexpr std::string_view to_string(Level level) {
  switch (level) {
    case Level::Parent: return "parent";
    case Level::Intermediate: return "intermediate";
    case Level::Sentence: return "sentence";
    case Level::Fine: return "fine";
  }
  return "?";
}

inline std::optional<Level> parse_level(std::string_view name) {
  for (Level level : kAllLevels) {
    if (to_string(level) == name) return level;
  }
  return std::nullopt;
}

constexpr char level_tag(Level level) {
  switch (level) {
    case Level::Parent: return 'p';
    case Level::Intermediate: return 'i';
    case Level::Sentence: return 's';
    case Level::Fine: return 'f';
  }
  return '?';
}

constexpr std::optional<Level> level_from_tag(char tag) {
  switch (tag) {
    case 'p': return Level::Parent;
    case 'i': return Level::Intermediate;
    case 's': return Level::Sentence;
    case 'f': return Level::Fine;
    default: return std::nullopt;
  }
}

/// Distance from the top of the hierarchy. Sentence and fine chunks are both
/// children of intermediates, so they share a depth.
constexpr int depth(Level level) {
  switch (level) {
    case Level::Parent: return 0;
    case Level::Intermediate: return 1;
    case Level::Sentence:
    case Level::Fine: return 2;
  }
  return -1;
}

constexpr std::optional<Level> parent_level(Level level) {
  switch (level) {
    case Level::Parent: return std::nullopt;
    case Level::Intermediate: return Level::Parent;
    case Level::Sentence:
    case Level::Fine: return Level::Intermediate;
  }
  return std::nullopt;
}

using DocumentId = std::string;

/// Half-open byte range [begin, end) into a source document.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  constexpr std::size_t size() const noexcept { return end - begin; }
  constexpr bool contains(const CharSpan& other) const noexcept {
    return begin <= other.begin && other.end <= end;
  }
  friend constexpr bool operator==(const CharSpan&, const CharSpan&) = default;
};

/// Deterministic chunk identifier: `<doc>#p0001.i0002.s0003`.
///
/// The last segment encodes the chunk's level and its ordinal among siblings
/// of the same level, so re-chunking an identical document reproduces the
/// same ids.
class ChunkId {
 public:
  ChunkId() = default;
  explicit ChunkId(std::string value) : value_(std::move(value)) {}

  static ChunkId parent(const DocumentId& doc, std::size_t ordinal) {
    return ChunkId(doc + '#' + segment(Level::Parent, ordinal));
  }

  ChunkId child(Level level, std::size_t ordinal) const {
    return ChunkId(value_ + '.' + segment(level, ordinal));
  }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  std::optional<Level> level() const {
    auto seg = last_segment();
    if (seg.size() < 2) return std::nullopt;
    return level_from_tag(seg.front());
  }

  std::optional<std::size_t> ordinal() const {
    auto seg = last_segment();
    if (seg.size() < 2) return std::nullopt;
    std::size_t value = 0;
    for (char c : seg.substr(1)) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
  }

  std::string_view document() const {
    auto hash = value_.rfind('#');
    if (hash == std::string::npos) return {};
    return std::string_view(value_).substr(0, hash);
  }

  friend auto operator<=>(const ChunkId&, const ChunkId&) = default;
  friend bool operator==(const ChunkId&, const ChunkId&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ChunkId& id) { return os << id.value_; }

 private:
  static std::string segment(Level level, std::size_t ordinal) {
    std::string digits = std::to_string(ordinal);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return std::string(1, level_tag(level)) + digits;
  }

  std::string_view last_segment() const {
    auto hash = value_.rfind('#');
    if (hash == std::string::npos) return {};
    auto tail = std::string_view(value_).substr(hash + 1);
    auto dot = tail.rfind('.');
    return dot == std::string_view::npos ? tail : tail.substr(dot + 1);
  }

  std::string value_;
};

}  // namespace hrr

template <>
struct std::hash<hrr::ChunkId> {
  std::size_t operator()(const hrr::ChunkId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

namespace hrr {

/// Token budgets and splitting rules the corpus was built under.
struct ChunkingConfig {
  std::size_t parent_size = 2048;
  std::size_t parent_overlap = 0;
  std::size_t intermediate_size = 512;
  std::size_t intermediate_overlap = 0;
  // Sub-intermediate tier used only by the child-to-parent baseline.
  bool build_fine_level = false;
  std::size_t fine_size = 256;
  // Longest run of tokens treated as one sentence before a forced split.
  std::size_t max_sentence_tokens = 400;
  std::string tokenizer = "simple";

  void validate() const {
    if (parent_size == 0 || intermediate_size == 0 || fine_size == 0 || max_sentence_tokens == 0)
      fail(ErrorCode::InvalidConfig, "chunk sizes must be positive");
    if (intermediate_size >= parent_size)
      fail(ErrorCode::InvalidConfig, "intermediate_size must be smaller than parent_size");
    if (parent_overlap >= parent_size)
      fail(ErrorCode::InvalidConfig, "parent_overlap must be smaller than parent_size");
    if (intermediate_overlap >= intermediate_size)
      fail(ErrorCode::InvalidConfig, "intermediate_overlap must be smaller than intermediate_size");
    if (build_fine_level && fine_size >= intermediate_size)
      fail(ErrorCode::InvalidConfig, "fine_size must be smaller than intermediate_size");
  }

  /// Upper bound on token_count for a chunk at `level`.
  std::size_t budget(Level level) const {
    switch (level) {
      case Level::Parent: return parent_size;
      case Level::Intermediate: return intermediate_size;
      case Level::Sentence: return std::min(intermediate_size, max_sentence_tokens);
      case Level::Fine: return fine_size;
    }
    return 0;
  }

  std::size_t overlap(Level level) const {
    switch (level) {
      case Level::Parent: return parent_overlap;
      case Level::Intermediate: return intermediate_overlap;
      default: return 0;
    }
  }

  friend bool operator==(const ChunkingConfig&, const ChunkingConfig&) = default;
};

inline void to_json(nlohmann::json& j, const ChunkingConfig& c) {
  j = nlohmann::json{{"parent_size", c.parent_size},
                     {"parent_overlap", c.parent_overlap},
                     {"intermediate_size", c.intermediate_size},
                     {"intermediate_overlap", c.intermediate_overlap},
                     {"build_fine_level", c.build_fine_level},
                     {"fine_size", c.fine_size},
                     {"max_sentence_tokens", c.max_sentence_tokens},
                     {"tokenizer", c.tokenizer}};
}

inline void from_json(const nlohmann::json& j, ChunkingConfig& c) {
  j.at("parent_size").get_to(c.parent_size);
  j.at("parent_overlap").get_to(c.parent_overlap);
  j.at("intermediate_size").get_to(c.intermediate_size);
  j.at("intermediate_overlap").get_to(c.intermediate_overlap);
  j.at("build_fine_level").get_to(c.build_fine_level);
  j.at("fine_size").get_to(c.fine_size);
  j.at("max_sentence_tokens").get_to(c.max_sentence_tokens);
  j.at("tokenizer").get_to(c.tokenizer);
}

struct ChunkNode {
  ChunkId id;
  Level level = Level::Parent;
  DocumentId doc_id;
  std::optional<ChunkId> parent_id;
  CharSpan span;
  std::size_t token_count = 0;
  // Set when the chunk ends inside a sentence because the sentence alone
  // exceeded the level's budget.
  bool hard_split = false;

  friend bool operator==(const ChunkNode&, const ChunkNode&) = default;
};

/// All chunks of one document, as produced by the chunker.
struct CorpusFragment {
  DocumentId doc_id;
  std::string text;
  std::vector<ChunkNode> chunks;
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(ChunkingConfig config) : config_(std::move(config)) {}

  const ChunkingConfig& config() const noexcept { return config_; }

  void add_document(DocumentId id, std::string text) {
    auto [it, inserted] = documents_.emplace(std::move(id), std::move(text));
    if (!inserted) fail(ErrorCode::InvalidInput, "duplicate document id: " + it->first);
  }

  /// Appends a node and records it under its parent in the children index.
  /// Duplicates are stored as-is so validate_corpus can report them.
  void add_chunk(ChunkNode node) {
    by_id_.try_emplace(node.id, chunks_.size());
    if (node.parent_id) children_[*node.parent_id].push_back(node.id);
    chunks_.push_back(std::move(node));
  }

  void add(CorpusFragment fragment) {
    add_document(fragment.doc_id, std::move(fragment.text));
    for (auto& node : fragment.chunks) add_chunk(std::move(node));
  }

  const std::map<DocumentId, std::string>& documents() const noexcept { return documents_; }
  const std::vector<ChunkNode>& chunks() const noexcept { return chunks_; }
  const std::map<ChunkId, std::vector<ChunkId>>& children_index() const noexcept {
    return children_;
  }
  bool empty() const noexcept { return chunks_.empty(); }

  const ChunkNode* find(const ChunkId& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &chunks_[it->second];
  }

  const ChunkNode& at(const ChunkId& id) const {
    const ChunkNode* node = find(id);
    if (node == nullptr) fail(ErrorCode::UnknownChunk, id.str());
    return *node;
  }

  std::span<const ChunkId> children(const ChunkId& id) const {
    auto it = children_.find(id);
    if (it == children_.end()) return {};
    return it->second;
  }

  std::vector<ChunkId> children(const ChunkId& id, Level level) const {
    std::vector<ChunkId> out;
    for (const auto& child : children(id)) {
      if (at(child).level == level) out.push_back(child);
    }
    return out;
  }

  /// Chunks of one level in insertion (document) order.
  std::vector<const ChunkNode*> level_chunks(Level level) const {
    std::vector<const ChunkNode*> out;
    for (const auto& node : chunks_) {
      if (node.level == level) out.push_back(&node);
    }
    return out;
  }

  std::size_t count(Level level) const {
    return static_cast<std::size_t>(std::count_if(
        chunks_.begin(), chunks_.end(), [&](const ChunkNode& n) { return n.level == level; }));
  }

  std::string_view text(const ChunkNode& node) const {
    auto it = documents_.find(node.doc_id);
    if (it == documents_.end()) fail(ErrorCode::InvalidCorpus, "unknown document " + node.doc_id);
    if (node.span.end > it->second.size() || node.span.begin > node.span.end)
      fail(ErrorCode::InvalidCorpus, "span out of range for " + node.id.str());
    return std::string_view(it->second).substr(node.span.begin, node.span.size());
  }

  std::string_view text(const ChunkId& id) const { return text(at(id)); }

 private:
  ChunkingConfig config_;
  std::map<DocumentId, std::string> documents_;
  std::vector<ChunkNode> chunks_;
  std::unordered_map<ChunkId, std::size_t> by_id_;
  std::map<ChunkId, std::vector<ChunkId>> children_;
};

/// Unique ancestor of `chunk` at `target`; identity when the levels match.
inline ChunkId resolve_parent(const Corpus& corpus, const ChunkId& chunk, Level target) {
  const ChunkNode* node = &corpus.at(chunk);
  if (node->level == target) return node->id;
  if (depth(target) >= depth(node->level)) {
    fail(ErrorCode::LevelViolation, std::string(to_string(target)) + " is not above " +
                                        std::string(to_string(node->level)) + " for " +
                                        chunk.str());
  }
  while (node->level != target) {
    if (!node->parent_id) fail(ErrorCode::InvalidCorpus, "broken parent chain at " + node->id.str());
    node = corpus.find(*node->parent_id);
    if (node == nullptr) fail(ErrorCode::InvalidCorpus, "dangling parent link under " + chunk.str());
  }
  return node->id;
}

/// Reassembles a document from its parent chunks in ordinal order.
inline std::string reassemble_document(const Corpus& corpus, const DocumentId& doc) {
  std::vector<const ChunkNode*> parents;
  for (const auto* node : corpus.level_chunks(Level::Parent)) {
    if (node->doc_id == doc) parents.push_back(node);
  }
  std::sort(parents.begin(), parents.end(),
            [](const ChunkNode* a, const ChunkNode* b) { return a->id.ordinal() < b->id.ordinal(); });
  std::string out;
  for (const auto* node : parents) out.append(corpus.text(*node));
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  DuplicateId,
  IdLevelMismatch,
  UnknownDocument,
  SpanOutOfRange,
  UnexpectedParent,
  MissingParentLink,
  DanglingParent,
  HierarchySkip,
  DocumentMismatch,
  NotNested,
  BudgetExceeded,
  ChildIndexMismatch,
  OrdinalGap,
  CoverageGap,
  UncoveredDocument,
};

constexpr std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::IdLevelMismatch: return "IdLevelMismatch";
    case ViolationKind::UnknownDocument: return "UnknownDocument";
    case ViolationKind::SpanOutOfRange: return "SpanOutOfRange";
    case ViolationKind::UnexpectedParent: return "UnexpectedParent";
    case ViolationKind::MissingParentLink: return "MissingParentLink";
    case ViolationKind::DanglingParent: return "DanglingParent";
    case ViolationKind::HierarchySkip: return "HierarchySkip";
    case ViolationKind::DocumentMismatch: return "DocumentMismatch";
    case ViolationKind::NotNested: return "NotNested";
    case ViolationKind::BudgetExceeded: return "BudgetExceeded";
    case ViolationKind::ChildIndexMismatch: return "ChildIndexMismatch";
    case ViolationKind::OrdinalGap: return "OrdinalGap";
    case ViolationKind::CoverageGap: return "CoverageGap";
    case ViolationKind::UncoveredDocument: return "UncoveredDocument";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string subject;  // chunk or document id
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

// Checks that `spans` (already in ordinal order) tile `outer` with no gaps.
inline std::optional<std::string> tiling_error(const CharSpan& outer,
                                               const std::vector<CharSpan>& spans) {
  if (spans.empty()) return "no children";
  std::size_t cursor = outer.begin;
  for (const auto& span : spans) {
    if (span.begin != cursor) {
      std::ostringstream os;
      os << "expected child at byte " << cursor << ", found " << span.begin;
      return os.str();
    }
    cursor = span.end;
  }
  if (cursor != outer.end) {
    std::ostringstream os;
    os << "children end at byte " << cursor << ", parent ends at " << outer.end;
    return os.str();
  }
  return std::nullopt;
}

}  // namespace detail

/// Lists every broken hierarchy invariant. Empty result means the corpus is
/// well formed. Order of the output is deterministic.
inline std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  const auto& config = corpus.config();
  const auto& docs = corpus.documents();

  std::unordered_map<ChunkId, int> seen;
  for (const auto& node : corpus.chunks()) {
    const std::string& subject = node.id.str();
    if (++seen[node.id] == 2) {
      out.push_back({ViolationKind::DuplicateId, subject, "id appears more than once"});
    }
    if (node.id.level() != node.level) {
      out.push_back({ViolationKind::IdLevelMismatch, subject,
                     "id does not encode level " + std::string(to_string(node.level))});
    }

    auto doc = docs.find(node.doc_id);
    if (doc == docs.end()) {
      out.push_back({ViolationKind::UnknownDocument, subject, "document " + node.doc_id});
    } else if (node.span.begin >= node.span.end || node.span.end > doc->second.size()) {
      out.push_back({ViolationKind::SpanOutOfRange, subject, "span outside document"});
    }

    if (node.token_count > config.budget(node.level)) {
      out.push_back({ViolationKind::BudgetExceeded, subject,
                     std::to_string(node.token_count) + " > " +
                         std::to_string(config.budget(node.level))});
    }

    auto expected_parent = parent_level(node.level);
    if (!expected_parent) {
      if (node.parent_id) {
        out.push_back({ViolationKind::UnexpectedParent, subject, "parent-level node has a parent"});
      }
      continue;
    }
    if (!node.parent_id) {
      out.push_back({ViolationKind::MissingParentLink, subject, "no parent link"});
      continue;
    }
    const ChunkNode* parent = corpus.find(*node.parent_id);
    if (parent == nullptr) {
      out.push_back({ViolationKind::DanglingParent, subject, "parent " + node.parent_id->str()});
      continue;
    }
    if (parent->level != *expected_parent) {
      out.push_back({ViolationKind::HierarchySkip, subject,
                     std::string(to_string(node.level)) + " linked to " +
                         std::string(to_string(parent->level)) + " " + parent->id.str()});
    }
    if (parent->doc_id != node.doc_id) {
      out.push_back({ViolationKind::DocumentMismatch, subject, "parent in another document"});
    }
    if (!parent->span.contains(node.span)) {
      out.push_back({ViolationKind::NotNested, subject, "span escapes " + parent->id.str()});
    }
  }

  // Children index must be the exact inverse of the parent links.
  for (const auto& [parent_id, kids] : corpus.children_index()) {
    if (corpus.find(parent_id) == nullptr) {
      out.push_back({ViolationKind::ChildIndexMismatch, parent_id.str(),
                     "children recorded for a missing chunk"});
    }
    for (const auto& kid : kids) {
      const ChunkNode* node = corpus.find(kid);
      if (node == nullptr || node->parent_id != parent_id) {
        out.push_back({ViolationKind::ChildIndexMismatch, kid.str(),
                       "index entry does not match parent link"});
      }
    }
  }
  for (const auto& node : corpus.chunks()) {
    if (!node.parent_id) continue;
    auto kids = corpus.children(*node.parent_id);
    if (std::count(kids.begin(), kids.end(), node.id) < 1) {
      out.push_back({ViolationKind::ChildIndexMismatch, node.id.str(), "missing from children index"});
    }
  }

  // Ordinals and coverage, grouped by container (document or parent chunk).
  auto check_group = [&](const std::string& subject, const CharSpan& outer,
                         const std::vector<const ChunkNode*>& group, bool check_tiling) {
    std::vector<CharSpan> spans;
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i]->id.ordinal() != i) {
        out.push_back({ViolationKind::OrdinalGap, group[i]->id.str(),
                       "expected ordinal " + std::to_string(i)});
      }
      spans.push_back(group[i]->span);
    }
    if (check_tiling) {
      if (auto err = detail::tiling_error(outer, spans)) {
        out.push_back({ViolationKind::CoverageGap, subject, *err});
      }
    }
  };

  for (const auto& [doc_id, text] : docs) {
    std::vector<const ChunkNode*> parents;
    for (const auto* node : corpus.level_chunks(Level::Parent)) {
      if (node->doc_id == doc_id) parents.push_back(node);
    }
    if (parents.empty()) {
      out.push_back({ViolationKind::UncoveredDocument, doc_id, "document has no parent chunks"});
      continue;
    }
    check_group(doc_id, CharSpan{0, text.size()}, parents, config.parent_overlap == 0);
  }

  for (const auto& node : corpus.chunks()) {
    if (node.level != Level::Parent && node.level != Level::Intermediate) continue;
    if (seen[node.id] > 1 && corpus.find(node.id) != &node) continue;
    for (Level child_level : kAllLevels) {
      if (parent_level(child_level) != node.level) continue;
      std::vector<const ChunkNode*> group;
      for (const auto& kid : corpus.children(node.id)) {
        const ChunkNode* k = corpus.find(kid);
        if (k != nullptr && k->level == child_level) group.push_back(k);
      }
      if (group.empty()) {
        bool required = child_level != Level::Fine;
        if (required) {
          out.push_back({ViolationKind::CoverageGap, node.id.str(),
                         "no " + std::string(to_string(child_level)) + " children"});
        }
        continue;
      }
      // Overlapping siblings carry extra leading context, so exact tiling only
      // holds when neither this level nor the children's level overlaps.
      bool tiles = config.overlap(node.level) == 0 && config.overlap(child_level) == 0;
      check_group(node.id.str(), node.span, group, tiles);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Line-delimited record file

inline std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

inline constexpr std::string_view kCorpusFormat = "hrr-corpus";
inline constexpr int kCorpusFormatVersion = 1;

/// Writes one header record followed by one record per chunk. Text is
/// omitted unless `include_text` is set; it is always recoverable from the
/// source document and the span.
inline void write_corpus(const Corpus& corpus, std::ostream& os, bool include_text = false) {
  nlohmann::json header;
  header["format"] = kCorpusFormat;
  header["version"] = kCorpusFormatVersion;
  header["chunking"] = corpus.config();
  auto docs = nlohmann::json::array();
  for (const auto& [id, text] : corpus.documents()) {
    docs.push_back({{"id", id}, {"bytes", text.size()}, {"fnv1a64", hex64(fnv1a64(text))}});
  }
  header["documents"] = std::move(docs);
  os << header.dump() << '\n';

  for (const auto& node : corpus.chunks()) {
    nlohmann::json rec;
    rec["id"] = node.id.str();
    rec["level"] = to_string(node.level);
    rec["doc_id"] = node.doc_id;
    rec["parent_id"] = node.parent_id ? nlohmann::json(node.parent_id->str()) : nlohmann::json();
    rec["char_span"] = {node.span.begin, node.span.end};
    rec["token_count"] = node.token_count;
    if (node.hard_split) rec["hard_split"] = true;
    if (include_text) rec["text"] = std::string(corpus.text(node));
    os << rec.dump() << '\n';
  }
}

/// Inverse of write_corpus. `load_document` supplies source text by id; its
/// size and checksum must match the header.
inline Corpus read_corpus(std::istream& is,
                          const std::function<std::string(const DocumentId&)>& load_document) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::Format, "corpus file is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != kCorpusFormat ||
        header.at("version").get<int>() != kCorpusFormatVersion) {
      fail(ErrorCode::Format, "unsupported corpus format");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("bad corpus header: ") + e.what());
  }

  Corpus corpus(header.at("chunking").get<ChunkingConfig>());
  for (const auto& doc : header.at("documents")) {
    auto id = doc.at("id").get<std::string>();
    std::string text = load_document(id);
    if (text.size() != doc.at("bytes").get<std::size_t>() ||
        hex64(fnv1a64(text)) != doc.at("fnv1a64").get<std::string>()) {
      fail(ErrorCode::InvalidCorpus, "source document changed since ingest: " + id);
    }
    corpus.add_document(std::move(id), std::move(text));
  }

  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      ChunkNode node;
      node.id = ChunkId(rec.at("id").get<std::string>());
      auto level = parse_level(rec.at("level").get<std::string>());
      if (!level) fail(ErrorCode::Format, "unknown level on line " + std::to_string(line_no));
      node.level = *level;
      node.doc_id = rec.at("doc_id").get<std::string>();
      if (!rec.at("parent_id").is_null()) node.parent_id = ChunkId(rec["parent_id"].get<std::string>());
      const auto& span = rec.at("char_span");
      node.span = CharSpan{span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
      node.token_count = rec.at("token_count").get<std::size_t>();
      node.hard_split = rec.value("hard_split", false);
      corpus.add_chunk(std::move(node));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace hrr
