#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxner/corpus_store.hpp"
#include "ctxner/learning_example.hpp"
#include "ctxner/recognizer.hpp"
#include "ctxner/weighting.hpp"

namespace ctxner {

struct GoldAnnotation {
  std::string doc;
  Span span;
  std::string class_label;

  auto operator<=>(const GoldAnnotation&) const = default;
};

struct GoldCorpus {
  std::vector<GoldAnnotation> annotations;
};

/// Reads `doc<TAB>start_token<TAB>end_token<TAB>class`. Throws Malformed
/// if two spans of the same class overlap within a document.
GoldCorpus load_gold(const std::filesystem::path& path);
void validate(const GoldCorpus& gold);

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::optional<double> precision;  // absent when nothing was found
  std::optional<double> recall;     // absent when gold is empty
};

/// Exact-span scoring: a system annotation is correct iff gold holds the
/// same document, span and class. Each gold annotation can be matched by
/// at most one system annotation. Annotations of class `unknown` do not
/// count as found.
EvalReport evaluate(std::span<const Annotation> system, const GoldCorpus& gold);

std::string report_text(const EvalReport& report);
std::string report_tsv(const EvalReport& report);

struct GrowthPoint {
  std::size_t doc_count = 0;
  std::size_t example_occurrences = 0;  // sum of nc over all contexts
  std::size_t context_count = 0;        // distinct contexts

  bool operator==(const GrowthPoint&) const = default;
};

/// Context statistics for growing prefixes (manifest order) of the corpus.
/// Steps must be positive, strictly increasing and at most the corpus
/// size; throws Input otherwise.
std::vector<GrowthPoint> growth_curve(const CorpusManifest& corpus,
                                      std::span<const LearningExample> examples,
                                      std::span<const std::size_t> step_sizes,
                                      const WeightConfig& config = {});

/// `docs<TAB>occurrences<TAB>contexts`.
std::string growth_to_tsv(std::span<const GrowthPoint> points);

}  // namespace ctxner
