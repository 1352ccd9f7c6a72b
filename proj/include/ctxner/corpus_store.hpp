#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ctxner {

/// Origin identity of a document: the lowercased host for web locators,
/// the file stem for local paths. Two documents with equal SourceId are
/// treated as coming from the same source when counting distinct sources.
struct SourceId {
  std::string value;

  auto operator<=>(const SourceId&) const = default;
};

enum class DocKind { Plain, Markup };

std::string_view to_string(DocKind kind);
DocKind parse_doc_kind(std::string_view text);

struct Document {
  std::string id;
  SourceId source;
  std::string uri;
  std::string raw;
  std::string clean;
  DocKind kind = DocKind::Plain;

  bool operator==(const Document&) const = default;
};

struct CorpusManifest {
  std::vector<Document> documents;  // sorted by id
  std::string class_label;

  std::set<SourceId> sources() const;
  bool contains_uri(std::string_view uri) const;
};

/// Maps a locator to its SourceId. Locators with a `scheme://` prefix use
/// the host (userinfo and port dropped, lowercased); `file://` locators and
/// bare paths use the file name with known text extensions stripped.
/// Idempotent. Throws Input naming the locator if it cannot be parsed.
SourceId normalize_source(std::string_view uri);

/// Converts CRLF and lone CR to LF.
std::string normalize_newlines(std::string_view text);

/// Produces the analysable text of a document. Plain text only gets its
/// newlines normalized. Markup loses tags, comments, and script/style
/// blocks; entity references are decoded; whitespace runs collapse to one
/// space and the result is trimmed. Throws Input with the byte offset if
/// `raw` is not valid UTF-8.
std::string clean_text(std::string_view raw, DocKind kind);

/// Builds a document, cleaning `raw` and deriving the source from `uri`.
Document make_document(std::string id, std::string uri, std::string raw,
                       DocKind kind);

/// Sorts by id and checks id/uri uniqueness; throws Input on violation.
void validate(CorpusManifest& corpus);

/// Reads `manifest.tsv` plus `docs/<file>` (cleaned text). When a
/// `raw/<file>` copy exists it is loaded as the raw text. The optional
/// `class.txt` holds the class label.
CorpusManifest load_corpus(const std::filesystem::path& dir);

void save_corpus(const CorpusManifest& corpus, const std::filesystem::path& dir);

}  // namespace ctxner
