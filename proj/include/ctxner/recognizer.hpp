#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxner/context_extract.hpp"
#include "ctxner/corpus_store.hpp"
#include "ctxner/weighting.hpp"

namespace ctxner {

inline constexpr std::string_view kUnknownClass = "unknown";

/// Context -> weight for one entity class. Weights are strictly positive.
class ClassTable {
 public:
  void add(const ContextKey& context, double w);
  const double* find(const ContextKey& context) const;

  const std::unordered_map<ContextKey, double, ContextKeyHash>& weights() const noexcept {
    return weights_;
  }
  bool empty() const noexcept { return weights_.empty(); }

 private:
  std::unordered_map<ContextKey, double, ContextKeyHash> weights_;
};

ClassTable to_class_table(const WeightTable& table);

struct RecognitionModel {
  std::map<std::string, ClassTable> tables;  // class label -> weights
  double threshold = 0;
  double margin = 0;
  std::size_t max_entity_tokens = 4;
  Side side = Side::Left;

  /// Index over every context of every class, for candidate detection.
  ContextIndex context_index() const;
};

struct VoteContribution {
  ContextKey context;
  double w;
};

/// Per-class vote accumulators for one candidate phrase.
struct VoteState {
  std::map<std::string, double> votes;
  std::map<std::string, std::vector<VoteContribution>> contributing;
};

/// votes[class_label] += w. Throws Domain unless w > 0.
void vote(VoteState& state, const std::string& class_label, double w,
          const ContextKey& context = {});

struct Decision {
  std::string class_label;  // kUnknownClass when undecided
  double score = 0;         // highest vote
  double runner_up = 0;     // second highest vote, 0 if only one class voted
};

/// The class with the highest vote, provided that vote reaches `threshold`
/// and beats every other class by at least `margin`. A tie on the highest
/// vote, or no votes at all, is undecided.
Decision classify(const VoteState& state, double threshold, double margin);

/// Tokens [first, last], inclusive.
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;

  auto operator<=>(const Span&) const = default;
};

/// Phrases next to a known context of any class. A phrase starts at the
/// token adjacent to the context and grows away from it up to
/// max_entity_tokens, stopping at a sentence boundary or before a token
/// that starts lowercase. Sorted, without duplicates.
std::vector<Span> detect_candidates(std::span<const Token> tokens, const RecognitionModel& model);

struct Annotation {
  std::string doc;
  Span span;
  std::string surface;
  std::string class_label;
  double score = 0;
  double runner_up = 0;
};

/// Votes for every candidate span: each matching context of each class
/// adds that class's weight once. Annotations sorted by span start.
std::vector<Annotation> recognize_document(const Document& doc, const RecognitionModel& model);

std::vector<Annotation> recognize(std::span<const Document> docs, const RecognitionModel& model,
                                  std::size_t threads = 0);

/// `doc, start_token, end_token, surface, class, score, runner_up`.
std::string annotations_to_tsv(std::span<const Annotation> annotations);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

/// Writes `model.tsv` (`class, table_file, threshold, margin`) and one
/// weight table per class into `dir`. Existing rows for other classes in
/// an existing model.tsv are kept.
void save_model_table(const std::filesystem::path& dir, const WeightTable& table,
                      double threshold, double margin);

/// Reads a model directory. Context side comes from `side`; context length
/// from the number of words. Throws Malformed with file and line number on
/// any parse error, including non-positive weights or rows that disagree
/// on threshold and margin.
RecognitionModel load_model(const std::filesystem::path& dir, Side side = Side::Left);

}  // namespace ctxner
