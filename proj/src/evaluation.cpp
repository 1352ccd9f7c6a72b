#include "ctxner/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ctxner/error.hpp"
#include "ctxner/parallel.hpp"
#include "ctxner/tsv.hpp"

namespace ctxner {

namespace {

const std::vector<std::string> kGoldHeader = {"doc", "start_token", "end_token", "class"};

std::string ratio(const std::optional<double>& v, int digits) {
  return v ? tsv::format_significant(*v, digits) : "n/a";
}

}  // namespace

GoldCorpus load_gold(const std::filesystem::path& path) {
  GoldCorpus gold;
  for (const auto& row : tsv::read(path, kGoldHeader)) {
    const auto& f = row.fields;
    GoldAnnotation a{f[0],
                     Span{tsv::parse_count(f[1], path, row.line),
                          tsv::parse_count(f[2], path, row.line)},
                     f[3]};
    if (a.span.last < a.span.first) {
      throw Error(ErrorKind::Malformed,
                  path.string() + ":" + std::to_string(row.line) + ": end_token before start_token");
    }
    gold.annotations.push_back(std::move(a));
  }
  validate(gold);
  return gold;
}

void validate(const GoldCorpus& gold) {
  auto sorted = gold.annotations;
  std::sort(sorted.begin(), sorted.end(), [](const GoldAnnotation& a, const GoldAnnotation& b) {
    return std::tie(a.doc, a.class_label, a.span) < std::tie(b.doc, b.class_label, b.span);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& prev = sorted[i - 1];
    const auto& cur = sorted[i];
    if (prev.doc == cur.doc && prev.class_label == cur.class_label &&
        cur.span.first <= prev.span.last) {
      throw Error(ErrorKind::Malformed, "overlapping gold spans in document '" + cur.doc +
                                            "' for class '" + cur.class_label + "'");
    }
  }
}

EvalReport evaluate(std::span<const Annotation> system, const GoldCorpus& gold) {
  std::multiset<GoldAnnotation> unmatched(gold.annotations.begin(), gold.annotations.end());
  EvalReport r;
  for (const auto& a : system) {
    if (a.class_label == kUnknownClass) continue;
    auto it = unmatched.find(GoldAnnotation{a.doc, a.span, a.class_label});
    if (it != unmatched.end()) {
      ++r.tp;
      unmatched.erase(it);
    } else {
      ++r.fp;
    }
  }
  r.fn = unmatched.size();
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  return r;
}

std::string report_text(const EvalReport& r) {
  std::string out = "matching   exact span and class\n";
  out += "found      " + std::to_string(r.tp + r.fp) + "\n";
  out += "gold       " + std::to_string(r.tp + r.fn) + "\n";
  out += "correct    " + std::to_string(r.tp) + "\n";
  out += "precision  " + ratio(r.precision, 6) + "\n";
  out += "recall     " + ratio(r.recall, 6) + "\n";
  return out;
}

std::string report_tsv(const EvalReport& r) {
  return "tp\tfp\tfn\tprecision\trecall\n" +
         tsv::join({std::to_string(r.tp), std::to_string(r.fp), std::to_string(r.fn),
                    ratio(r.precision, 17), ratio(r.recall, 17)}) +
         "\n";
}

std::vector<GrowthPoint> growth_curve(const CorpusManifest& corpus,
                                      std::span<const LearningExample> examples,
                                      std::span<const std::size_t> step_sizes,
                                      const WeightConfig& config) {
  const std::size_t n = corpus.documents.size();
  for (std::size_t i = 0; i < step_sizes.size(); ++i) {
    if (step_sizes[i] == 0) throw Error(ErrorKind::Input, "growth step must be positive");
    if (step_sizes[i] > n) {
      throw Error(ErrorKind::Input, "growth step " + std::to_string(step_sizes[i]) +
                                        " exceeds corpus size " + std::to_string(n));
    }
    if (i > 0 && step_sizes[i] <= step_sizes[i - 1]) {
      throw Error(ErrorKind::Input, "growth steps must be strictly increasing");
    }
  }

  std::vector<GrowthPoint> out(step_sizes.size());
  auto inner = config;
  inner.threads = 1;
  parallel_for(step_sizes.size(), config.threads, [&](std::size_t i) {
    std::span<const Document> prefix(corpus.documents.data(), step_sizes[i]);
    auto counts = count_contexts(prefix, examples, inner);
    out[i] = GrowthPoint{step_sizes[i], counts.sum_nc, counts.rows.size()};
  });
  return out;
}

std::string growth_to_tsv(std::span<const GrowthPoint> points) {
  std::string out = "docs\toccurrences\tcontexts\n";
  for (const auto& p : points) {
    out += tsv::join({std::to_string(p.doc_count), std::to_string(p.example_occurrences),
                      std::to_string(p.context_count)}) +
           "\n";
  }
  return out;
}

}  // namespace ctxner
