#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctxner/corpus_store.hpp"
#include "ctxner/learning_example.hpp"

namespace ctxner {

struct SearchQuery {
  std::string instance;      // surface form searched for
  std::size_t max_results = 10;
  std::string context_hint;  // optional words added around the instance; unused by default

  /// The string sent to the engine: instance, then the hint if any.
  std::string text() const;

  bool operator==(const SearchQuery&) const = default;
};

struct LinkResult {
  std::string uri;
  std::size_t rank = 0;  // 1-based
};

struct FetchedPage {
  std::string raw;
  DocKind kind = DocKind::Plain;
};

/// A web search engine plus page fetcher. `search` is called sequentially;
/// `fetch` may be called from several threads at once. Both report
/// failures by throwing.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::vector<LinkResult> search(const SearchQuery& query) = 0;
  virtual FetchedPage fetch(const std::string& uri) = 0;
};

/// Serves search results and pages from a fixture directory holding
/// `queries.tsv` (`query<TAB>uri<TAB>file`, header required). Results keep
/// file order per query. Files ending in .html/.htm are markup. A row
/// whose file is missing behaves as a dead link: it is listed by search
/// but its fetch throws.
class MockSearchClient final : public SearchClient {
 public:
  explicit MockSearchClient(std::filesystem::path dir);

  std::vector<LinkResult> search(const SearchQuery& query) override;
  FetchedPage fetch(const std::string& uri) override;

  std::size_t page_count() const noexcept { return pages_.size(); }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::vector<std::string>> results_;  // query -> uris
  std::map<std::string, std::filesystem::path> pages_;       // uri -> file
};

/// One query per distinct surface, in input order. Throws Input on empty
/// input or max_results == 0.
std::vector<SearchQuery> build_queries(std::span<const LearningExample> examples,
                                       std::size_t max_results,
                                       const std::string& context_hint = {});

struct FetchFailure {
  std::string uri;  // or the query text for a failed search
  std::string reason;
};

struct AcquireReport {
  CorpusManifest corpus;
  std::size_t added = 0;
  std::vector<FetchFailure> failures;
};

struct AcquireOptions {
  std::size_t concurrency = 4;  // simultaneous fetches
};

/// Searches every query, fetches each result not already in `existing`
/// (by uri) and appends it as a new document. New documents are numbered
/// after the existing ones in query order, then rank, regardless of the
/// order in which fetches complete. Failed fetches are recorded and
/// skipped. Throws Input if every search fails.
AcquireReport acquire(SearchClient& client, std::span<const SearchQuery> queries,
                      const CorpusManifest& existing, const AcquireOptions& options = {});

}  // namespace ctxner
