#include "ctxner/search_acquire.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <unordered_set>

#include "ctxner/error.hpp"
#include "ctxner/parallel.hpp"
#include "ctxner/tsv.hpp"

namespace ctxner {

namespace fs = std::filesystem;

namespace {

std::size_t next_document_number(const CorpusManifest& corpus) {
  std::size_t next = corpus.documents.size() + 1;
  for (const auto& doc : corpus.documents) {
    const auto& id = doc.id;
    if (id.size() < 2 || id[0] != 'd') continue;
    if (!std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    next = std::max(next, static_cast<std::size_t>(std::stoull(id.substr(1))) + 1);
  }
  return next;
}

std::string document_id(std::size_t number) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%06zu", number);
  return buf;
}

}  // namespace

std::string SearchQuery::text() const {
  return context_hint.empty() ? instance : instance + " " + context_hint;
}

MockSearchClient::MockSearchClient(fs::path dir) : dir_(std::move(dir)) {
  const auto index = dir_ / "queries.tsv";
  for (const auto& row : tsv::read(index, {"query", "uri", "file"})) {
    const auto& f = row.fields;
    auto& uris = results_[f[0]];
    if (std::find(uris.begin(), uris.end(), f[1]) == uris.end()) uris.push_back(f[1]);
    pages_.emplace(f[1], dir_ / f[2]);
  }
}

std::vector<LinkResult> MockSearchClient::search(const SearchQuery& query) {
  std::vector<LinkResult> out;
  auto it = results_.find(query.text());
  if (it == results_.end()) return out;
  for (const auto& uri : it->second) {
    if (out.size() >= query.max_results) break;
    out.push_back(LinkResult{uri, out.size() + 1});
  }
  return out;
}

FetchedPage MockSearchClient::fetch(const std::string& uri) {
  auto it = pages_.find(uri);
  if (it == pages_.end()) throw Error(ErrorKind::Input, "no such page: " + uri);
  if (!fs::exists(it->second)) throw Error(ErrorKind::Input, "dead link: " + uri);
  const auto ext = it->second.extension().string();
  const bool markup = ext == ".html" || ext == ".htm";
  return FetchedPage{tsv::read_file(it->second), markup ? DocKind::Markup : DocKind::Plain};
}

std::vector<SearchQuery> build_queries(std::span<const LearningExample> examples,
                                       std::size_t max_results,
                                       const std::string& context_hint) {
  if (examples.empty()) throw Error(ErrorKind::Input, "no learning examples to search for");
  if (max_results == 0) throw Error(ErrorKind::Input, "max_results must be positive");
  std::vector<SearchQuery> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : examples) {
    if (seen.insert(e.surface()).second) {
      out.push_back(SearchQuery{e.surface(), max_results, context_hint});
    }
  }
  return out;
}

AcquireReport acquire(SearchClient& client, std::span<const SearchQuery> queries,
                      const CorpusManifest& existing, const AcquireOptions& options) {
  AcquireReport report;
  report.corpus = existing;
  if (queries.empty()) return report;

  std::vector<std::string> pending;
  std::unordered_set<std::string> scheduled;
  std::size_t failed_searches = 0;
  for (const auto& query : queries) {
    std::vector<LinkResult> links;
    try {
      links = client.search(query);
    } catch (const std::exception& e) {
      ++failed_searches;
      report.failures.push_back(FetchFailure{query.text(), std::string("search failed: ") + e.what()});
      continue;
    }
    std::sort(links.begin(), links.end(),
              [](const LinkResult& a, const LinkResult& b) { return a.rank < b.rank; });
    for (const auto& link : links) {
      if (existing.contains_uri(link.uri) || !scheduled.insert(link.uri).second) continue;
      pending.push_back(link.uri);
    }
  }
  if (failed_searches == queries.size()) {
    throw Error(ErrorKind::Input, "acquisition failed: every search query failed (" +
                                      report.failures.front().reason + ")");
  }

  std::vector<std::optional<FetchedPage>> pages(pending.size());
  std::vector<std::string> errors(pending.size());
  parallel_for(pending.size(), std::max<std::size_t>(options.concurrency, 1), [&](std::size_t i) {
    try {
      pages[i] = client.fetch(pending[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::size_t number = next_document_number(existing);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (!pages[i]) {
      report.failures.push_back(FetchFailure{pending[i], errors[i]});
      continue;
    }
    try {
      report.corpus.documents.push_back(
          make_document(document_id(number), pending[i], std::move(pages[i]->raw), pages[i]->kind));
      ++number;
      ++report.added;
    } catch (const Error& e) {
      report.failures.push_back(FetchFailure{pending[i], e.what()});
    }
  }
  validate(report.corpus);
  return report;
}

}  // namespace ctxner
