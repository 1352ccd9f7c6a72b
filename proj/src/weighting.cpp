#include "ctxner/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "ctxner/error.hpp"
#include "ctxner/parallel.hpp"
#include "ctxner/tsv.hpp"

namespace ctxner {

namespace {

[[noreturn]] void domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }

std::string counts(std::size_t a, std::size_t b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

double context_frequency(std::size_t nc, std::size_t sum_nc) {
  if (sum_nc == 0) domain("context frequency: no context occurrences (empty extraction)");
  if (nc > sum_nc) domain("context frequency: nc exceeds sum_nc " + counts(nc, sum_nc));
  return static_cast<double>(nc) / static_cast<double>(sum_nc);
}

double learning_example_frequency(std::size_t nle, std::size_t total_examples) {
  if (total_examples == 0) domain("learning example frequency: no learning examples");
  if (nle > total_examples) {
    domain("learning example frequency: nle exceeds NLE " + counts(nle, total_examples));
  }
  return static_cast<double>(nle) / static_cast<double>(total_examples);
}

double document_frequency(std::size_t nd, std::size_t documents) {
  if (documents == 0) domain("document frequency: context found in no document");
  if (nd == 0 || nd > documents) {
    domain("document frequency: nd outside [1, D] " + counts(nd, documents));
  }
  return static_cast<double>(nd) / static_cast<double>(documents);
}

double inverse_context_frequency(std::size_t nc, std::size_t other_occurrences) {
  if (nc == 0) domain("inverse context frequency: nc must be positive");
  return static_cast<double>(nc) / static_cast<double>(std::max<std::size_t>(other_occurrences, 1));
}

double context_weight(double cf, double lef, double df, double icf) {
  return cf * lef * df * icf;
}

double tf(std::size_t frequency, std::size_t doc_total) {
  if (doc_total == 0) domain("tf: empty document");
  return static_cast<double>(frequency) / static_cast<double>(doc_total);
}

double idf(std::size_t documents, std::size_t documents_with_term) {
  if (documents_with_term == 0) domain("idf: term occurs in no document");
  if (documents_with_term > documents) {
    domain("idf: n exceeds N " + counts(documents, documents_with_term));
  }
  return std::log10(static_cast<double>(documents) / static_cast<double>(documents_with_term));
}

double tfidf(double tf_value, double idf_value) { return tf_value * idf_value; }

double tfidf(const TfIdfStats& s) {
  return tfidf(tf(s.frequency, s.doc_total), idf(s.documents, s.documents_with_term));
}

WeightedContext weigh(const ContextStats& stats, const GlobalStats& global) {
  WeightedContext row;
  row.stats = stats;
  row.cf = context_frequency(stats.nc, global.sum_nc);
  row.lef = learning_example_frequency(stats.nle, global.total_examples);
  row.df = document_frequency(stats.nd, stats.D);
  row.icf = inverse_context_frequency(stats.nc, stats.C);
  row.w = context_weight(row.cf, row.lef, row.df, row.icf);
  return row;
}

ContextCounts count_contexts(std::span<const Document> documents,
                             std::span<const LearningExample> examples,
                             const WeightConfig& config) {
  if (config.context_length == 0) throw Error(ErrorKind::Input, "context length must be at least 1");

  ContextCounts out;
  std::set<std::string> surfaces;
  for (const auto& e : examples) surfaces.insert(e.surface());
  out.total_examples = surfaces.size();
  if (documents.empty() || examples.empty()) return out;

  InstanceMatcher matcher(examples);
  std::vector<AnalyzedDocument> analyzed(documents.size());
  std::vector<std::set<ContextKey>> found(documents.size());
  parallel_for(documents.size(), config.threads, [&](std::size_t d) {
    analyzed[d] = analyze(documents[d], matcher);
    for (const auto& inst : analyzed[d].instances) {
      if (auto key = extract_context(inst, analyzed[d].tokens, config.context_length, config.side)) {
        found[d].insert(std::move(*key));
      }
    }
  });
  std::set<ContextKey> contexts;
  for (auto& s : found) contexts.merge(s);
  if (contexts.empty()) return out;
  ContextIndex index(contexts);

  struct Local {
    std::size_t nc = 0;
    std::size_t C = 0;
    std::set<std::size_t> examples;
  };
  std::vector<std::unordered_map<std::size_t, Local>> local(documents.size());
  parallel_for(documents.size(), config.threads, [&](std::size_t d) {
    visit_context_windows(analyzed[d], index, [&](std::size_t id, std::size_t,
                                                  std::optional<std::size_t> example) {
      auto& l = local[d][id];
      if (example) {
        ++l.nc;
        l.examples.insert(*example);
      } else {
        ++l.C;
      }
    });
  });

  struct Global {
    std::size_t nc = 0;
    std::size_t C = 0;
    std::set<std::size_t> examples;
    std::size_t D = 0;
    std::set<SourceId> sources;
  };
  std::vector<Global> merged(index.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (auto& [id, l] : local[d]) {
      auto& g = merged[id];
      g.nc += l.nc;
      g.C += l.C;
      g.examples.merge(l.examples);
      ++g.D;
      g.sources.insert(documents[d].source);
    }
  }

  // index ids follow std::set order, so rows come out in ContextKey order
  out.rows.reserve(index.size());
  for (std::size_t id = 0; id < index.size(); ++id) {
    const auto& g = merged[id];
    out.rows.push_back(ContextStats{index.keys()[id], g.nc, g.C, g.examples.size(),
                                    g.sources.size(), g.D});
    out.sum_nc += g.nc;
  }
  return out;
}

void rank(std::vector<WeightedContext>& rows) {
  std::sort(rows.begin(), rows.end(), [](const WeightedContext& a, const WeightedContext& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.stats.nc != b.stats.nc) return a.stats.nc > b.stats.nc;
    return a.stats.context < b.stats.context;
  });
}

WeightTable build_weight_table(const CorpusManifest& corpus,
                               std::span<const LearningExample> examples,
                               const WeightConfig& config) {
  if (examples.empty()) throw Error(ErrorKind::Input, "no learning examples");
  for (const auto& e : examples) {
    if (e.class_label() != examples.front().class_label()) {
      throw Error(ErrorKind::Input, "learning examples span several classes ('" +
                                        examples.front().class_label() + "', '" +
                                        e.class_label() + "'); weigh one class at a time");
    }
  }
  if (corpus.documents.empty()) throw Error(ErrorKind::EmptyResult, "corpus has no documents");

  auto counted = count_contexts(corpus.documents, examples, config);
  WeightTable table;
  table.global.class_label = examples.front().class_label();
  table.global.total_examples = counted.total_examples;
  std::vector<ContextStats> kept;
  for (auto& row : counted.rows) {
    if (row.nc >= std::max<std::size_t>(config.min_count, 1)) {
      table.global.sum_nc += row.nc;
      kept.push_back(std::move(row));
    }
  }
  if (kept.empty()) {
    throw Error(ErrorKind::EmptyResult,
                counted.rows.empty()
                    ? "no contexts extracted: do the learning examples occur in the corpus?"
                    : "no context reaches min_count " + std::to_string(config.min_count));
  }
  table.rows.reserve(kept.size());
  for (const auto& row : kept) table.rows.push_back(weigh(row, table.global));
  rank(table.rows);
  return table;
}

std::string weight_table_to_tsv(const WeightTable& table) {
  std::string out = "context\tcf\tdf\tlef\ticf\tw\n";
  for (const auto& r : table.rows) {
    out += tsv::join({r.stats.context.text(), tsv::format_significant(r.cf, 7),
                      tsv::format_significant(r.df, 7), tsv::format_significant(r.lef, 7),
                      tsv::format_significant(r.icf, 7), tsv::format_significant(r.w, 7)}) +
           "\n";
  }
  return out;
}

std::string context_stats_to_tsv(const WeightTable& table) {
  std::string out = "context\tside\tnc\tC\tnle\tnd\tD\n";
  for (const auto& r : table.rows) {
    const auto& s = r.stats;
    out += tsv::join({s.context.text(), std::string(to_string(s.context.side)),
                      std::to_string(s.nc), std::to_string(s.C), std::to_string(s.nle),
                      std::to_string(s.nd), std::to_string(s.D)}) +
           "\n";
  }
  return out;
}

}  // namespace ctxner
