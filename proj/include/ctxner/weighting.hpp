#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ctxner/context_extract.hpp"
#include "ctxner/corpus_store.hpp"
#include "ctxner/learning_example.hpp"

namespace ctxner {

// Context weights.
//
// For a context c extracted next to the seed examples of one class:
//
//   cf  = nc / sum_nc   share of all example-adjacent context occurrences
//   lef = nle / NLE     share of the seed examples seen with c
//   df  = nd / D        distinct sources among the documents containing c
//   icf = nc / C        example-adjacent vs. other-phrase occurrences
//   w   = cf * lef * df * icf
//
// icf is a ratio, not a reciprocal, and exceeds 1 whenever c is seen more
// often with examples than without. C is floored at 1 so that contexts
// never seen next to other phrases keep a finite weight.

/// nc / sum_nc. Throws Domain if sum_nc == 0 or nc > sum_nc.
double context_frequency(std::size_t nc, std::size_t sum_nc);
/// nle / NLE. Throws Domain if NLE == 0 or nle > NLE.
double learning_example_frequency(std::size_t nle, std::size_t total_examples);
/// nd / D. Throws Domain if D == 0 or nd is not in [1, D].
double document_frequency(std::size_t nd, std::size_t documents);
/// nc / max(C, 1). Throws Domain if nc == 0.
double inverse_context_frequency(std::size_t nc, std::size_t other_occurrences);
double context_weight(double cf, double lef, double df, double icf);

// Classic tf-idf, kept as a comparison baseline. idf uses log base 10.
double tf(std::size_t frequency, std::size_t doc_total);
double idf(std::size_t documents, std::size_t documents_with_term);
double tfidf(double tf, double idf);

struct TfIdfStats {
  std::size_t frequency = 0;
  std::size_t doc_total = 0;
  std::size_t documents = 0;
  std::size_t documents_with_term = 0;
};

double tfidf(const TfIdfStats& stats);

struct ContextStats {
  ContextKey context;
  std::size_t nc = 0;   // occurrences next to a learning example
  std::size_t C = 0;    // occurrences next to any other phrase
  std::size_t nle = 0;  // distinct learning examples seen with the context
  std::size_t nd = 0;   // distinct sources among the D documents
  std::size_t D = 0;    // documents containing the context

  bool operator==(const ContextStats&) const = default;
};

struct GlobalStats {
  std::size_t sum_nc = 0;
  std::size_t total_examples = 0;  // NLE
  std::string class_label;

  bool operator==(const GlobalStats&) const = default;
};

struct WeightedContext {
  ContextStats stats;
  double cf = 0;
  double lef = 0;
  double df = 0;
  double icf = 0;
  double w = 0;
};

/// Applies the four ratios and their product to raw counts.
WeightedContext weigh(const ContextStats& stats, const GlobalStats& global);

struct WeightConfig {
  std::size_t context_length = 2;
  Side side = Side::Left;
  std::size_t min_count = 1;  // rows with nc below this are dropped
  std::size_t threads = 0;    // 0 = hardware concurrency
};

/// Raw per-context counts for every context adjacent to an example, in
/// ContextKey order. NLE is the number of distinct surfaces in `examples`.
/// Documents are counted in parallel and merged; the result does not
/// depend on document order.
struct ContextCounts {
  std::vector<ContextStats> rows;
  std::size_t sum_nc = 0;
  std::size_t total_examples = 0;
};

ContextCounts count_contexts(std::span<const Document> documents,
                             std::span<const LearningExample> examples,
                             const WeightConfig& config);

struct WeightTable {
  GlobalStats global;
  std::vector<WeightedContext> rows;  // w desc, nc desc, words asc
};

/// Counts, filters by min_count, weighs and ranks the contexts of one
/// class. sum_nc is taken over the retained rows. Throws Input if the
/// examples are empty or span several classes, EmptyResult if no context
/// survives.
WeightTable build_weight_table(const CorpusManifest& corpus,
                               std::span<const LearningExample> examples,
                               const WeightConfig& config = {});

/// Sorts rows by w desc, then nc desc, then words and side ascending.
void rank(std::vector<WeightedContext>& rows);

/// `context<TAB>cf<TAB>df<TAB>lef<TAB>icf<TAB>w`, 7 significant digits.
std::string weight_table_to_tsv(const WeightTable& table);

/// Raw counts: `context<TAB>side<TAB>nc<TAB>C<TAB>nle<TAB>nd<TAB>D`.
std::string context_stats_to_tsv(const WeightTable& table);

}  // namespace ctxner
