#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxner/corpus_store.hpp"
#include "ctxner/learning_example.hpp"

namespace ctxner {

struct Token {
  std::string text;
  std::size_t start = 0;  // byte offsets into the clean text, [start, end)
  std::size_t end = 0;
  bool ends_sentence = false;  // a sentence boundary follows this token

  bool operator==(const Token&) const = default;
};

/// Splits clean text into words: maximal runs of letters and digits, with
/// an apostrophe, period or hyphen kept when it sits between two word
/// characters. A single letter directly followed by '.' keeps the period
/// ("W."), as do a few title abbreviations ("Mr.", "Dr."). A '.', '!' or
/// '?' followed by end of text, or by whitespace and a word that does not
/// start lowercase, marks a sentence boundary on the preceding token.
/// Commas never mark a boundary.
std::vector<Token> tokenize(std::string_view text);

enum class Side { Left, Right };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);

/// A case-sensitive word sequence on one side of an entity instance.
struct ContextKey {
  std::vector<std::string> words;
  Side side = Side::Left;

  std::size_t length() const noexcept { return words.size(); }
  /// Words joined by single spaces.
  std::string text() const;

  auto operator<=>(const ContextKey&) const = default;
};

struct ContextKeyHash {
  std::size_t operator()(const ContextKey& key) const noexcept;
};

/// Tokens [first, last] (inclusive) of a document matching one example.
struct InstanceOccurrence {
  std::string doc;
  std::size_t example = 0;  // index into the examples the matcher was built from
  std::size_t first = 0;
  std::size_t last = 0;

  bool operator==(const InstanceOccurrence&) const = default;
};

/// Longest-match-first, left-to-right, non-overlapping matcher over the
/// surface forms of a set of examples. Matches never span a sentence
/// boundary. Repeated surfaces keep the first example.
class InstanceMatcher {
 public:
  explicit InstanceMatcher(std::span<const LearningExample> examples);

  std::vector<InstanceOccurrence> find(std::span<const Token> tokens,
                                       const std::string& doc = {}) const;

 private:
  struct Pattern {
    std::vector<std::string> words;
    std::size_t example;
  };
  // first word -> patterns, longest first
  std::unordered_map<std::string, std::vector<Pattern>> by_first_word_;
};

std::vector<InstanceOccurrence> find_instances(std::span<const Token> tokens,
                                               std::span<const LearningExample> examples);

/// The `length` tokens adjacent to `occurrence` on `side`, if they all lie
/// inside the document and in the same sentence as the instance.
std::optional<ContextKey> extract_context(const InstanceOccurrence& occurrence,
                                          std::span<const Token> tokens,
                                          std::size_t length, Side side);

/// Dense numbering of a set of contexts for fast window lookup.
class ContextIndex {
 public:
  ContextIndex() = default;
  explicit ContextIndex(const std::set<ContextKey>& contexts);

  std::size_t add(const ContextKey& key);
  std::optional<std::size_t> find(Side side, std::span<const Token> window) const;

  const std::vector<ContextKey>& keys() const noexcept { return keys_; }
  const std::set<std::size_t>& lengths(Side side) const {
    return side == Side::Left ? left_lengths_ : right_lengths_;
  }
  std::size_t size() const noexcept { return keys_.size(); }

 private:
  std::vector<ContextKey> keys_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::set<std::size_t> left_lengths_;
  std::set<std::size_t> right_lengths_;
};

/// One appearance of a known context next to some phrase. `anchor` is the
/// first token of the adjacent phrase (for right contexts, of the instance
/// if there is one, else of the single token to the left).
struct ContextOccurrence {
  ContextKey context;
  std::string doc;
  std::size_t anchor = 0;
  bool with_example = false;
  std::optional<std::size_t> example;  // index into the examples

  bool operator==(const ContextOccurrence&) const = default;
};

/// A document with its tokens and example instances.
struct AnalyzedDocument {
  const Document* document = nullptr;
  std::vector<Token> tokens;
  std::vector<InstanceOccurrence> instances;
};

AnalyzedDocument analyze(const Document& doc, const InstanceMatcher& matcher);

/// Calls visit(context_id, anchor, example) for every window of `doc`
/// whose words equal an indexed context and that has an adjacent token in
/// the same sentence. `example` is set when the adjacent phrase is an
/// instance. Windows never cross a sentence boundary.
void visit_context_windows(
    const AnalyzedDocument& doc, const ContextIndex& index,
    const std::function<void(std::size_t context, std::size_t anchor,
                             std::optional<std::size_t> example)>& visit);

/// Every context adjacent to an instance in `corpus`.
std::set<ContextKey> collect_contexts(const CorpusManifest& corpus,
                                      std::span<const LearningExample> examples,
                                      std::size_t length, Side side);

/// All occurrences of `contexts` in the corpus, in document order then
/// token order.
std::vector<ContextOccurrence> scan_context_occurrences(
    const CorpusManifest& corpus, const std::set<ContextKey>& contexts,
    std::span<const LearningExample> examples);

/// TSV with header `doc, context_words, side, with_example, example_surface`.
std::string occurrences_to_tsv(std::span<const ContextOccurrence> occurrences,
                               std::span<const LearningExample> examples);

}  // namespace ctxner
